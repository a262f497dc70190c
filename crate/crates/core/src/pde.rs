//! Explicit solution formulas (heat, wave, biharmonic half-space) and checks
//! that almost periods of the data pass to the solution.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::conv::{
    containment_margin, l1_convolution, metric_factor, propagation_check, sphere_measure,
    BiharmonicPart, ConvOptions, ConvValue, Kernel,
};
use crate::error::{Error, Result};
use crate::metric::{
    defect_from_samples, integrand_lipschitz, windowed_defect_with, DefectOptions, DefectResult,
    Sample,
};
use crate::model::{make_grid, CompactWindow, FunctionHandle, MetricSpec, Region, Relation, SupBound};
use crate::par;
use crate::quad::{integrate_box, integrate_vec, Adaptive, DiskRule, SphereRule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeValue {
    pub value: f64,
    /// Quadrature estimate, truncation bound and propagated data error.
    pub err: f64,
}

fn expect_shape(f: &FunctionHandle, dim: usize, codim: usize) -> Result<()> {
    if f.dim() != dim || f.codim() != codim {
        return Err(Error::Shape(format!(
            "{} maps R^{} -> R^{}, expected R^{dim} -> R^{codim}",
            f.name(),
            f.dim(),
            f.codim()
        )));
    }
    Ok(())
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{what} must be positive, got {x}")))
    }
}

/// (G(t)F)(x) = (4πt)^{−n/2} ∫ e^{−|y|²/4t} F(x − y) dy.
pub fn heat_apply(f: &FunctionHandle, t: f64, x: &[f64], tol: f64) -> Result<ConvValue> {
    if !(t > 0.0) {
        return Err(Error::Domain { point: vec![t] });
    }
    l1_convolution(&Kernel::Gaussian { t, n: f.dim() }, f, x, ConvOptions::new(tol))
}

/// u(x,t) = ½[f(x−at) + f(x+at)] + (1/2a) ∫_{x−at}^{x+at} g.
pub fn dalembert(
    f: &FunctionHandle,
    g: &FunctionHandle,
    a: f64,
    x: f64,
    t: f64,
    quad_tol: f64,
) -> Result<PdeValue> {
    expect_shape(f, 1, 1)?;
    expect_shape(g, 1, 1)?;
    positive(a, "wave speed")?;
    let l = f.eval_checked(&[x - a * t])?;
    let r = f.eval_checked(&[x + a * t])?;
    let q = integrate_vec(
        |s| {
            let e = g.eval_checked(&[s]).expect("g evaluable on the dependence interval");
            vec![e.value[0], e.err]
        },
        2,
        x - a * t,
        x + a * t,
        Adaptive::new(quad_tol),
    )?;
    Ok(PdeValue {
        value: 0.5 * (l.value[0] + r.value[0]) + q.value[0] / (2.0 * a),
        err: 0.5 * (l.err + r.err) + (q.err_estimate + q.value[1].abs()) / (2.0 * a),
    })
}

/// Compares `grad_g` with central differences of `g` at 10 seeded points of
/// the cube center ± (radius + 1); tolerance 1e-4(1 + |supplied|).
pub fn check_gradient(
    g: &FunctionHandle,
    grad_g: &FunctionHandle,
    center: &[f64],
    radius: f64,
) -> Result<()> {
    let n = center.len();
    expect_shape(g, n, 1)?;
    expect_shape(grad_g, n, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x6772_6164);
    let r = radius + 1.0;
    for _ in 0..10 {
        let p: Vec<f64> = center.iter().map(|c| c + rng.gen_range(-r..=r)).collect();
        let supplied = grad_g.eval(&p)?;
        let mut fd = Vec::with_capacity(n);
        for i in 0..n {
            let h = 1e-5 * (1.0 + p[i].abs());
            let mut up = p.clone();
            let mut dn = p.clone();
            up[i] += h;
            dn[i] -= h;
            fd.push((g.eval(&up)?[0] - g.eval(&dn)?[0]) / (2.0 * h));
        }
        let diff = crate::model::dist(&fd, &supplied);
        if !(diff <= 1e-4 * (1.0 + crate::model::norm(&supplied))) {
            return Err(Error::GradientConsistency {
                point: p,
                fd,
                supplied,
            });
        }
    }
    Ok(())
}

/// Σ wᵢ [c_g g(pᵢ) + c_d ∇g(pᵢ)·σᵢ + c_h h(pᵢ)] with pᵢ = x + dt·σᵢ.
#[allow(clippy::too_many_arguments)]
fn spherical_sum(
    g: &FunctionHandle,
    grad_g: &FunctionHandle,
    h: &FunctionHandle,
    x: &[f64],
    radius: f64,
    nodes: &[Vec<f64>],
    weights: &[f64],
    coeffs: [f64; 3],
) -> Result<PdeValue> {
    let terms = par::try_map_indexed(nodes.len(), |i| -> Result<(f64, f64)> {
        let s = &nodes[i];
        let p: Vec<f64> = x.iter().zip(s).map(|(a, b)| a + radius * b).collect();
        let eg = g.eval_checked(&p)?;
        let ed = grad_g.eval_checked(&p)?;
        let eh = h.eval_checked(&p)?;
        let dot: f64 = ed.value.iter().zip(s).map(|(a, b)| a * b).sum();
        let w = weights[i];
        let v = coeffs[0] * eg.value[0] + coeffs[1] * dot + coeffs[2] * eh.value[0];
        let e = coeffs[0] * eg.err + coeffs[1].abs() * ed.err + coeffs[2].abs() * eh.err;
        Ok((w * v, w * e))
    })?;
    let (v, e): (Vec<f64>, Vec<f64>) = terms.into_iter().unzip();
    Ok(PdeValue {
        value: par::pairwise_sum(&v),
        err: par::pairwise_sum(&e),
    })
}

fn check_wave_args(t: f64, d: f64) -> Result<()> {
    if !(t > 0.0) {
        return Err(Error::Domain { point: vec![t] });
    }
    positive(d, "wave speed")
}

/// Kirchhoff's formula in ℝ³ with a product rule on the unit sphere.
#[allow(clippy::too_many_arguments)]
pub fn kirchhoff3d(
    g: &FunctionHandle,
    grad_g: &FunctionHandle,
    h: &FunctionHandle,
    d: f64,
    x: &[f64],
    t: f64,
    rule: &SphereRule,
) -> Result<PdeValue> {
    check_wave_args(t, d)?;
    if x.len() != 3 || rule.points.first().is_some_and(|p| p.len() != 3) {
        return Err(Error::Shape("Kirchhoff's formula needs points and a sphere rule in R^3".into()));
    }
    expect_shape(h, 3, 1)?;
    check_gradient(g, grad_g, x, d * t)?;
    let c = 1.0 / (4.0 * PI);
    spherical_sum(g, grad_g, h, x, d * t, &rule.points, &rule.weights, [c, c * d * t, c * t])
}

/// Poisson's formula in ℝ² with constants 1/2π (the weight 1/√(1−|σ|²) has
/// mass 2π on the unit disk).
#[allow(clippy::too_many_arguments)]
pub fn poisson2d(
    g: &FunctionHandle,
    grad_g: &FunctionHandle,
    h: &FunctionHandle,
    d: f64,
    x: &[f64],
    t: f64,
    rule: &DiskRule,
) -> Result<PdeValue> {
    check_wave_args(t, d)?;
    if x.len() != 2 {
        return Err(Error::Shape("Poisson's formula needs points in R^2".into()));
    }
    expect_shape(h, 2, 1)?;
    check_gradient(g, grad_g, x, d * t)?;
    let c = 1.0 / (2.0 * PI);
    let nodes: Vec<Vec<f64>> = rule.points.iter().map(|p| p.to_vec()).collect();
    spherical_sum(g, grad_g, h, x, d * t, &nodes, &rule.weights, [c, c * d * t, c * t])
}

fn biharmonic_constants(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (
        2.0 * gamma((nf + 3.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0),
        gamma((nf + 1.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0),
    )
}

fn bounded_sup(f: &FunctionHandle) -> Result<f64> {
    match f.sup_bound() {
        SupBound::Bounded(m) => Ok(m),
        _ => Err(Error::Precondition(format!("{} must be flagged bounded", f.name()))),
    }
}

/// Poisson-type solution of the biharmonic Dirichlet problem in the half-space
/// ℝⁿ × (0, ∞), n ≤ 3. In polar coordinates ξ = y·tanθ·ω both kernels become
/// bounded: C₀ sinⁿ⁻¹θ cos²θ and C₁ y sinⁿ⁻¹θ. The rim θ > π/2 − δ is cut and
/// bounded by C₀|S|M₀δ³/3 + C₁y|S|M₁δ.
pub fn biharmonic_halfspace(
    g0: &FunctionHandle,
    g1: &FunctionHandle,
    x: &[f64],
    y: f64,
    tol: f64,
) -> Result<PdeValue> {
    if !(y > 0.0) {
        return Err(Error::Domain { point: vec![y] });
    }
    let n = x.len();
    if !(1..=3).contains(&n) {
        return Err(Error::Config(format!("biharmonic formula implemented for n <= 3, got {n}")));
    }
    expect_shape(g0, n, 1)?;
    expect_shape(g1, n, 1)?;
    positive(tol, "tolerance")?;
    let (m0, m1) = (bounded_sup(g0)?, bounded_sup(g1)?);
    let (c0, c1) = biharmonic_constants(n);
    let s = sphere_measure(n);

    let half = PI / 2.0;
    let d0 = if m0 > 0.0 { (1.5 * tol / (c0 * s * m0)).cbrt() } else { half };
    let d1 = if m1 > 0.0 { 0.5 * tol / (c1 * y * s * m1) } else { half };
    let delta = d0.min(d1).min(half);
    let theta_a = half - delta;
    let tail = c0 * s * m0 * delta.powi(3) / 3.0 + c1 * y * s * m1 * delta;

    let eval_dir = |theta: f64, omega: &[f64], jac: f64| -> [f64; 2] {
        let r = y * theta.tan();
        let p: Vec<f64> = x.iter().zip(omega).map(|(a, w)| a - r * w).collect();
        let e0 = g0.eval_checked(&p).expect("bounded data on R^n");
        let e1 = g1.eval_checked(&p).expect("bounded data on R^n");
        let k0 = c0 * jac * theta.cos().powi(2);
        let k1 = c1 * y * jac;
        [k0 * e0.value[0] + k1 * e1.value[0], k0 * e0.err + k1 * e1.err]
    };
    let integrand = |v: &[f64]| -> Vec<f64> {
        match n {
            1 => {
                let a = eval_dir(v[0], &[1.0], 1.0);
                let b = eval_dir(v[0], &[-1.0], 1.0);
                vec![a[0] + b[0], a[1] + b[1]]
            }
            2 => eval_dir(v[0], &[v[1].cos(), v[1].sin()], v[0].sin()).to_vec(),
            _ => {
                let (st, ct) = v[2].sin_cos();
                let omega = [st * v[1].cos(), st * v[1].sin(), ct];
                eval_dir(v[0], &omega, v[0].sin().powi(2) * st).to_vec()
            }
        }
    };
    // dyadic slabs |ξ| ∈ [2ᵏy, 2ᵏ⁺¹y] so each slab sees a bounded number of
    // oscillations of the data per unit of its length
    let mut cuts = vec![0.0];
    let mut k = 0;
    while (2f64.powi(k)).atan() < theta_a {
        cuts.push(2f64.powi(k).atan());
        k += 1;
    }
    cuts.push(theta_a);
    let slab_tol = 0.5 * tol / (cuts.len() - 1) as f64;
    let mut value = 0.0;
    let mut err = tail;
    for c in cuts.windows(2) {
        let (mut lo, mut hi) = (vec![c[0]], vec![c[1]]);
        if n >= 2 {
            lo.push(0.0);
            hi.push(2.0 * PI);
        }
        if n == 3 {
            lo.push(0.0);
            hi.push(PI);
        }
        let q = integrate_box(&integrand, 2, &lo, &hi, Adaptive::new(slab_tol))?;
        value += q.value[0];
        err += q.err_estimate + q.value[1].abs();
    }
    Ok(PdeValue { value, err })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PdeKind {
    /// u_tt = a² u_xx.
    Wave { a: f64 },
    /// u_t = u_xx (the Gaussian semigroup above).
    Heat,
}

/// Central-difference residual of the PDE at (x, t), second order in h.
pub fn residual_check(
    u: impl Fn(f64, f64) -> Result<f64>,
    kind: PdeKind,
    x: f64,
    t: f64,
    h: f64,
) -> Result<f64> {
    positive(h, "stencil step")?;
    let c = u(x, t)?;
    let uxx = (u(x + h, t)? - 2.0 * c + u(x - h, t)?) / (h * h);
    match kind {
        PdeKind::Wave { a } => {
            let utt = (u(x, t + h)? - 2.0 * c + u(x, t - h)?) / (h * h);
            Ok(utt - a * a * uxx)
        }
        PdeKind::Heat => {
            if !(t - h > 0.0) {
                return Err(Error::Domain { point: vec![x, t - h] });
            }
            let ut = (u(x, t + h)? - u(x, t - h)?) / (2.0 * h);
            Ok(ut - uxx)
        }
    }
}

/// A solution formula with its data, at a fixed time (or height y).
#[derive(Debug, Clone)]
pub enum PdeFormula {
    Heat {
        f: FunctionHandle,
        t: f64,
    },
    DAlembert {
        f: FunctionHandle,
        g: FunctionHandle,
        a: f64,
        t: f64,
    },
    Kirchhoff {
        g: FunctionHandle,
        grad_g: Option<FunctionHandle>,
        h: FunctionHandle,
        d: f64,
        t: f64,
        resolution: usize,
    },
    Poisson {
        g: FunctionHandle,
        grad_g: Option<FunctionHandle>,
        h: FunctionHandle,
        d: f64,
        t: f64,
        radial: usize,
        azimuthal: usize,
    },
    Biharmonic {
        g0: FunctionHandle,
        g1: FunctionHandle,
        y: f64,
    },
}

fn need_grad(grad_g: &Option<FunctionHandle>) -> Result<&FunctionHandle> {
    grad_g
        .as_ref()
        .ok_or_else(|| Error::Config("the formula uses the gradient of g, which was not supplied".into()))
}

impl PdeFormula {
    pub fn dim(&self) -> usize {
        match self {
            PdeFormula::Heat { f, .. } => f.dim(),
            PdeFormula::DAlembert { .. } => 1,
            PdeFormula::Kirchhoff { .. } => 3,
            PdeFormula::Poisson { .. } => 2,
            PdeFormula::Biharmonic { g0, .. } => g0.dim(),
        }
    }

    /// u(x) at the formula's fixed time.
    pub fn eval(&self, x: &[f64], tol: f64) -> Result<PdeValue> {
        match self {
            PdeFormula::Heat { f, t } => {
                expect_shape(f, x.len(), 1)?;
                let v = heat_apply(f, *t, x, tol)?;
                Ok(PdeValue {
                    value: v.value[0],
                    err: v.err,
                })
            }
            PdeFormula::DAlembert { f, g, a, t } => dalembert(f, g, *a, x[0], *t, tol),
            PdeFormula::Kirchhoff {
                g,
                grad_g,
                h,
                d,
                t,
                resolution,
            } => kirchhoff3d(g, need_grad(grad_g)?, h, *d, x, *t, &SphereRule::new(3, *resolution)?),
            PdeFormula::Poisson {
                g,
                grad_g,
                h,
                d,
                t,
                radial,
                azimuthal,
            } => poisson2d(g, need_grad(grad_g)?, h, *d, x, *t, &DiskRule::new(*radial, *azimuthal)?),
            PdeFormula::Biharmonic { g0, g1, y } => biharmonic_halfspace(g0, g1, x, *y, tol),
        }
    }

    /// Data components with the factor by which each one's defect enters the
    /// solution's defect, and the radius of the domain of dependence (None
    /// when the kernel has unbounded support).
    fn data(&self) -> Result<(Vec<(&FunctionHandle, f64)>, Option<f64>)> {
        Ok(match self {
            PdeFormula::Heat { f, .. } => (vec![(f, 1.0)], None),
            PdeFormula::DAlembert { f, g, a, t } => (vec![(f, 1.0), (g, t.abs())], Some(a * t.abs())),
            PdeFormula::Kirchhoff { g, grad_g, h, d, t, .. } => (
                vec![(g, 1.0), (need_grad(grad_g)?, d * t), (h, *t)],
                Some(d * t),
            ),
            // (1/2π)∫_{B₁}|σ|/√(1−|σ|²) dσ = π/4
            PdeFormula::Poisson { g, grad_g, h, d, t, .. } => (
                vec![(g, 1.0), (need_grad(grad_g)?, PI / 4.0 * d * t), (h, *t)],
                Some(d * t),
            ),
            PdeFormula::Biharmonic { g0, g1, y } => (vec![(g0, 1.0), (g1, *y)], None),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataDefect {
    pub name: String,
    pub defect: DefectResult,
    /// Factor with which this defect enters the solution defect.
    pub mass: f64,
}

/// Both sides of ‖u(·+τ) − u(·)‖ ≤ Σ massᵢ·sup_{enlarged}|Δdataᵢ| + tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PdePropagation {
    pub lhs: DefectResult,
    pub data: Vec<DataDefect>,
    pub tail_term: f64,
    pub factor: f64,
    pub rhs: f64,
    pub rhs_slack: f64,
}

impl PdePropagation {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs.value <= self.rhs + self.rhs_slack + self.lhs.certified_slack + tol
    }
}

/// Defect of x ↦ u(x) at τ on `w` against the data defects at τ on
/// `enlarged`. Finite-speed formulas need `enlarged` ⊇ w grown by the
/// dependence radius; the others charge the kernel mass outside the margin.
pub fn pde_propagation_check(
    formula: &PdeFormula,
    tau: &[f64],
    w: &CompactWindow,
    enlarged: &CompactWindow,
    spec: &MetricSpec,
    tol: f64,
) -> Result<PdePropagation> {
    positive(tol, "tolerance")?;
    let n = formula.dim();
    if tau.len() != n || w.dim() != n || enlarged.dim() != n {
        return Err(Error::Shape(format!("formula acts on R^{n}; shift and windows must match")));
    }
    if let PdeFormula::Heat { f, t } = formula {
        let r = propagation_check(
            &Kernel::Gaussian { t: *t, n },
            f,
            &Relation::Identity,
            tau,
            w,
            enlarged,
            spec,
            ConvOptions::new(tol),
        )?;
        return Ok(PdePropagation {
            lhs: r.lhs,
            data: vec![DataDefect {
                name: f.name().to_string(),
                defect: r.data_defect,
                mass: r.l1_norm,
            }],
            tail_term: r.tail_term,
            factor: r.factor,
            rhs: r.rhs,
            rhs_slack: r.rhs_slack,
        });
    }
    let (data, radius) = formula.data()?;
    let factor = metric_factor(spec, w)?;
    let tail_term = match (radius, formula) {
        (Some(r), _) => {
            if !enlarged.contains_window(&w.expanded(r)) {
                return Err(Error::Config(format!(
                    "the enlarged window must contain the window grown by the dependence radius {r}"
                )));
            }
            0.0
        }
        (None, PdeFormula::Biharmonic { g0, g1, y }) => {
            let margin = containment_margin(w, enlarged, false)?;
            let k = |part| Kernel::PoissonBiharmonic { n, y: *y, part };
            2.0 * (bounded_sup(g0)? * k(BiharmonicPart::Displacement).tail(margin)
                + bounded_sup(g1)? * k(BiharmonicPart::Normal).tail(margin))
        }
        (None, _) => unreachable!("only the heat and biharmonic kernels have unbounded support"),
    };

    let grid = make_grid(w, &Region::full(n))?;
    let samples = par::try_map_indexed(grid.len(), |i| -> Result<Sample> {
        let x = grid.point(i);
        let moved: Vec<f64> = x.iter().zip(tau).map(|(a, b)| a + b).collect();
        let u0 = formula.eval(&x, tol)?;
        let u1 = formula.eval(&moved, tol)?;
        Ok(Sample {
            d: (u1.value - u0.value).abs(),
            err: u0.err + u1.err,
        })
    })?;
    let lhs = defect_from_samples(&grid, w, spec, &samples, DefectOptions::default())?;

    let plain = MetricSpec::sup();
    let mut defects = Vec::with_capacity(data.len());
    for (f, mass) in data {
        let opts = DefectOptions {
            integrand_lipschitz: integrand_lipschitz(f, &Relation::Identity, enlarged, &plain),
        };
        defects.push(DataDefect {
            name: f.name().to_string(),
            defect: windowed_defect_with(f, &Relation::Identity, tau, enlarged, &plain, opts)?,
            mass,
        });
    }
    let weighted: f64 = defects.iter().map(|d| d.mass * d.defect.value).sum();
    let slack: f64 = defects.iter().map(|d| d.mass * d.defect.certified_slack).sum();
    Ok(PdePropagation {
        lhs,
        data: defects,
        tail_term,
        factor,
        rhs: factor * (weighted + tail_term),
        rhs_slack: factor * slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn biharmonic_constants_give_unit_mass() {
        for n in 1..=3 {
            let (c0, c1) = biharmonic_constants(n);
            let s = sphere_measure(n);
            // ∫₀^{π/2} sinⁿ⁻¹θ cos²θ dθ and ∫₀^{π/2} sinⁿ⁻¹θ dθ
            let (i0, i1) = match n {
                1 => (PI / 4.0, PI / 2.0),
                2 => (1.0 / 3.0, 1.0),
                _ => (PI / 16.0, PI / 4.0),
            };
            assert!((c0 * s * i0 - 1.0).abs() < 1e-14, "n={n}");
            assert!((c1 * s * i1 - 1.0).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn heat_rejects_nonpositive_time() {
        let c = zoo::constant(1, vec![1.0]);
        assert!(matches!(heat_apply(&c, 0.0, &[0.0], 1e-8), Err(Error::Domain { .. })));
    }
}
