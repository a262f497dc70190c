//! Infinite convolution products and L¹ convolutions with certified tails.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::metric::{
    defect_from_samples, integrand_lipschitz, windowed_defect_with, DefectOptions, DefectResult,
    Sample,
};
use crate::model::{
    dist, make_grid, CompactWindow, FunctionHandle, MetricSpec, Norm, Phi, Relation, SupBound,
    Weight,
};
use crate::par;
use crate::quad::{integrate_box, Adaptive};

/// Which half of the biharmonic Poisson pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BiharmonicPart {
    /// 2Γ((n+3)/2)π^{−(n+1)/2} y³ (|ξ|²+y²)^{−(n+3)/2}, mass 1.
    Displacement,
    /// Γ((n+1)/2)π^{−(n+1)/2} y² (|ξ|²+y²)^{−(n+1)/2}, mass y.
    Normal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// R(s) = e^{−ωs} M for s ≥ 0.
    ExpMatrix { m: DMatrix<f64>, omega: f64 },
    /// (4πt)^{−n/2} e^{−|ξ|²/4t} on ℝⁿ.
    Gaussian { t: f64, n: usize },
    PoissonBiharmonic { n: usize, y: f64, part: BiharmonicPart },
    /// Piecewise-linear kernel on [nodes₀, nodes_last] ⊂ ℝ; outside the table
    /// |h(s)| ≤ c·e^{−κ|s|} is assumed and that mass is charged to the tail.
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
        envelope: Option<(f64, f64)>,
    },
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

pub(crate) fn sphere_measure(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

impl Kernel {
    pub fn exp_identity(m: usize, omega: f64) -> Self {
        Kernel::ExpMatrix {
            m: DMatrix::identity(m, m),
            omega,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Kernel::ExpMatrix { m, omega } => {
                if !(*omega > 0.0 && omega.is_finite()) {
                    return Err(Error::Config(format!("kernel omega must be positive, got {omega}")));
                }
                if m.nrows() != m.ncols() || m.is_empty() {
                    return Err(Error::Shape("kernel matrix must be square and nonempty".into()));
                }
            }
            Kernel::Gaussian { t, n } => {
                if !(*t > 0.0 && t.is_finite()) {
                    return Err(Error::Domain { point: vec![*t] });
                }
                if *n == 0 {
                    return Err(Error::Config("Gaussian dimension must be positive".into()));
                }
            }
            Kernel::PoissonBiharmonic { n, y, .. } => {
                if !(*y > 0.0 && y.is_finite()) {
                    return Err(Error::Domain { point: vec![*y] });
                }
                if *n == 0 {
                    return Err(Error::Config("biharmonic dimension must be positive".into()));
                }
            }
            Kernel::Tabulated { nodes, values, envelope } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return Err(Error::Shape("tabulated kernel needs >= 2 nodes and matching values".into()));
                }
                if nodes.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(Error::Config("tabulated kernel nodes must increase strictly".into()));
                }
                if let Some((c, k)) = envelope {
                    if !(*c >= 0.0 && *k > 0.0) {
                        return Err(Error::Config("envelope needs c >= 0 and kappa > 0".into()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimension of the integration variable.
    pub fn dim(&self) -> usize {
        match self {
            Kernel::ExpMatrix { .. } | Kernel::Tabulated { .. } => 1,
            Kernel::Gaussian { n, .. } | Kernel::PoissonBiharmonic { n, .. } => *n,
        }
    }

    /// Supported on s ≥ 0 only.
    pub fn one_sided(&self) -> bool {
        match self {
            Kernel::ExpMatrix { .. } => true,
            Kernel::Tabulated { nodes, envelope, .. } => nodes[0] >= 0.0 && envelope.is_none(),
            _ => false,
        }
    }

    /// ∫ h = c·I for scalar-like kernels; None when the mass is a general matrix.
    pub fn scalar_mass(&self) -> Option<f64> {
        match self {
            Kernel::ExpMatrix { m, omega } => {
                let c = m[(0, 0)];
                (*m == DMatrix::identity(m.nrows(), m.ncols()) * c).then_some(c / omega)
            }
            Kernel::Gaussian { .. } => Some(1.0),
            Kernel::PoissonBiharmonic { y, part, .. } => Some(match part {
                BiharmonicPart::Displacement => 1.0,
                BiharmonicPart::Normal => *y,
            }),
            Kernel::Tabulated { .. } => None,
        }
    }

    /// ∫ ‖h‖.
    pub fn l1_norm(&self) -> f64 {
        match self {
            Kernel::ExpMatrix { m, omega } => spectral_norm(m) / omega,
            Kernel::Gaussian { .. } => 1.0,
            Kernel::PoissonBiharmonic { y, part, .. } => match part {
                BiharmonicPart::Displacement => 1.0,
                BiharmonicPart::Normal => *y,
            },
            Kernel::Tabulated { nodes, values, .. } => {
                table_abs_mass(nodes, values, f64::NEG_INFINITY, f64::INFINITY) + self.envelope_mass(0.0)
            }
        }
    }

    fn envelope_mass(&self, a: f64) -> f64 {
        match self {
            Kernel::Tabulated {
                nodes,
                envelope: Some((c, k)),
                ..
            } => {
                let edge = nodes[0].abs().min(nodes[nodes.len() - 1].abs());
                let from = if nodes[0] <= 0.0 && nodes[nodes.len() - 1] >= 0.0 { edge } else { 0.0 };
                2.0 * c * (-k * from.max(a)).exp() / k
            }
            _ => 0.0,
        }
    }

    /// ∫ ‖h‖ outside the cube [−a, a]ⁿ (outside [0, a] for one-sided kernels).
    pub fn tail(&self, a: f64) -> f64 {
        let a = a.max(0.0);
        match self {
            Kernel::ExpMatrix { m, omega } => spectral_norm(m) * (-omega * a).exp() / omega,
            Kernel::Gaussian { t, n } => {
                let e = erfc(a / (2.0 * t.sqrt()));
                // 1 − (1 − e)ⁿ
                -((*n as f64) * (-e).ln_1p()).exp_m1()
            }
            Kernel::PoissonBiharmonic { n, y, part } => {
                if a == 0.0 {
                    return self.l1_norm();
                }
                // the cube's complement lies outside the ball of radius a
                let s = sphere_measure(*n);
                let nf = *n as f64;
                let bound = match part {
                    BiharmonicPart::Displacement => {
                        2.0 * gamma((nf + 3.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0) * y.powi(3) * s
                            / (3.0 * a.powi(3))
                    }
                    BiharmonicPart::Normal => {
                        gamma((nf + 1.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0) * y * y * s / a
                    }
                };
                bound.min(self.l1_norm())
            }
            Kernel::Tabulated { nodes, values, .. } => {
                table_abs_mass(nodes, values, f64::NEG_INFINITY, -a)
                    + table_abs_mass(nodes, values, a, f64::INFINITY)
                    + self.envelope_mass(a)
            }
        }
    }

    /// Scalar kernel value at ξ (ExpMatrix: the scalar factor e^{−ωs}, s ≥ 0).
    pub fn scalar_at(&self, xi: &[f64]) -> f64 {
        match self {
            Kernel::ExpMatrix { omega, .. } => {
                if xi[0] < 0.0 {
                    0.0
                } else {
                    (-omega * xi[0]).exp()
                }
            }
            Kernel::Gaussian { t, n } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                (4.0 * PI * t).powf(-(*n as f64) / 2.0) * (-r2 / (4.0 * t)).exp()
            }
            Kernel::PoissonBiharmonic { n, y, part } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum::<f64>() + y * y;
                let nf = *n as f64;
                match part {
                    BiharmonicPart::Displacement => {
                        2.0 * gamma((nf + 3.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0) * y.powi(3)
                            * r2.powf(-(nf + 3.0) / 2.0)
                    }
                    BiharmonicPart::Normal => {
                        gamma((nf + 1.0) / 2.0) * PI.powf(-(nf + 1.0) / 2.0) * y * y
                            * r2.powf(-(nf + 1.0) / 2.0)
                    }
                }
            }
            Kernel::Tabulated { nodes, values, .. } => interpolate(nodes, values, xi[0]),
        }
    }

    /// h(ξ) applied to a value vector.
    fn apply(&self, xi: &[f64], v: &[f64]) -> Vec<f64> {
        let s = self.scalar_at(xi);
        match self {
            Kernel::ExpMatrix { m, .. } => (0..m.nrows())
                .map(|i| s * (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum::<f64>())
                .collect(),
            _ => v.iter().map(|x| s * x).collect(),
        }
    }

    /// ‖h(ξ)‖ in operator norm.
    fn norm_at(&self, xi: &[f64]) -> f64 {
        match self {
            Kernel::ExpMatrix { m, .. } => self.scalar_at(xi) * spectral_norm(m),
            _ => self.scalar_at(xi).abs(),
        }
    }

    /// ∫ ‖h(ξ)‖·B(|center| + |ξ|) outside the cutoff cube, where B is the growth
    /// envelope of the data.
    fn weighted_tail(&self, bound: SupBound, center: f64, a: f64) -> Result<f64> {
        match bound {
            SupBound::Bounded(m) => Ok(m * self.tail(a)),
            SupBound::Unbounded => Err(Error::Precondition(
                "convolution needs bounded data (or a known growth envelope)".into(),
            )),
            SupBound::LogGrowth { c0, c1 } => match self {
                Kernel::ExpMatrix { m, omega } => {
                    // ∫_a^∞ e^{−ωs} ln(b+s) ds ≤ e^{−ωa}[ln(b+a)/ω + 1/(ω²(b+a))]
                    let b = 1.0 + center.abs();
                    let k = spectral_norm(m) * (-omega * a).exp();
                    Ok(k * ((c0 + c1 * (b + a).ln()) / omega + c1 / (omega * omega * (b + a))))
                }
                Kernel::Gaussian { t, n } => {
                    // ln(1+|c|+|ξ|) ≤ ln(1+|c|) + Σ|ξᵢ|; union bound over the axes
                    let nf = *n as f64;
                    let e = erfc(a / (2.0 * t.sqrt()));
                    let mean_abs = 2.0 * (t / PI).sqrt();
                    let big_a = c0 + c1 * (1.0 + center.abs()).ln();
                    let own = 2.0 * (t / PI).sqrt() * (-a * a / (4.0 * t)).exp();
                    Ok(nf * (big_a * e + c1 * (own + (nf - 1.0) * e * mean_abs)))
                }
                Kernel::Tabulated { envelope: None, .. } => Ok(0.0f64.max(
                    SupBound::LogGrowth { c0, c1 }.at_radius(center.abs() + a) * self.tail(a),
                )),
                _ => Err(Error::Precondition(
                    "this kernel needs bounded data; only a log-growth envelope is known".into(),
                )),
            },
        }
    }

    /// Integration box [lo, hi] for cutoff a.
    fn support(&self, a: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        match self {
            Kernel::Tabulated { nodes, envelope: None, .. } => {
                (vec![nodes[0].max(-a)], vec![nodes[nodes.len() - 1].min(a)])
            }
            Kernel::Tabulated { nodes, .. } => {
                (vec![nodes[0]], vec![nodes[nodes.len() - 1]])
            }
            _ if self.one_sided() => (vec![0.0], vec![a]),
            _ => (vec![-a; n], vec![a; n]),
        }
    }
}

fn interpolate(nodes: &[f64], values: &[f64], s: f64) -> f64 {
    if s < nodes[0] || s > nodes[nodes.len() - 1] {
        return 0.0;
    }
    let j = nodes.partition_point(|x| *x <= s).clamp(1, nodes.len() - 1);
    let (x0, x1) = (nodes[j - 1], nodes[j]);
    let u = (s - x0) / (x1 - x0);
    values[j - 1] * (1.0 - u) + values[j] * u
}

/// ∫ |interpolant| over [lo, hi] ∩ table, exact for a piecewise-linear function.
fn table_abs_mass(nodes: &[f64], values: &[f64], lo: f64, hi: f64) -> f64 {
    let mut total = 0.0;
    for j in 1..nodes.len() {
        let a = nodes[j - 1].max(lo);
        let b = nodes[j].min(hi);
        if a >= b {
            continue;
        }
        let (fa, fb) = (interpolate(nodes, values, a), interpolate(nodes, values, b));
        total += if fa * fb >= 0.0 {
            0.5 * (fa.abs() + fb.abs()) * (b - a)
        } else {
            // sign change: two triangles
            let z = a + (b - a) * fa.abs() / (fa.abs() + fb.abs());
            0.5 * fa.abs() * (z - a) + 0.5 * fb.abs() * (b - z)
        };
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvOptions {
    pub tail_tol: f64,
    pub quad_tol: f64,
    pub budget: usize,
}

impl ConvOptions {
    pub fn new(tail_tol: f64) -> Self {
        ConvOptions {
            tail_tol,
            quad_tol: tail_tol,
            budget: 4_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvValue {
    pub value: Vec<f64>,
    /// Certified tail + quadrature estimate + propagated data error.
    pub err: f64,
    pub tail: f64,
    pub cutoff: f64,
}

/// Smallest cutoff (up to bisection accuracy) with tail(a) ≤ tol.
fn solve_cutoff(tail: impl Fn(f64) -> Result<f64>, tol: f64) -> Result<f64> {
    if tail(0.0)? <= tol {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while tail(hi)? > tol {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Budget(format!("no cutoff reaches tail tolerance {tol}")));
        }
    }
    let mut lo = hi / 2.0;
    if hi == 1.0 {
        lo = 0.0;
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if tail(mid)? > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn check_data(kernel: &Kernel, f: &FunctionHandle) -> Result<()> {
    kernel.validate()?;
    if f.dim() != kernel.dim() {
        return Err(Error::Shape(format!(
            "kernel acts on R^{}, {} is defined on R^{}",
            kernel.dim(),
            f.name(),
            f.dim()
        )));
    }
    if let Kernel::ExpMatrix { m, .. } = kernel {
        if m.ncols() != f.codim() {
            return Err(Error::Shape(format!(
                "kernel matrix is {}x{}, {} has {} components",
                m.nrows(),
                m.ncols(),
                f.name(),
                f.codim()
            )));
        }
    }
    if !f.domain().is_full() {
        return Err(Error::Precondition(format!("{} must be defined on all of R^n", f.name())));
    }
    if !f.sup_bound().is_finite_growth() {
        return Err(Error::Precondition(format!(
            "{} carries no boundedness or growth information",
            f.name()
        )));
    }
    Ok(())
}

/// ∫ h(ξ) f(t − ξ) dξ with certified tail.
pub fn l1_convolution(kernel: &Kernel, f: &FunctionHandle, t: &[f64], opts: ConvOptions) -> Result<ConvValue> {
    check_data(kernel, f)?;
    if t.len() != f.dim() {
        return Err(Error::Shape(format!("point has dimension {}, expected {}", t.len(), f.dim())));
    }
    let center = crate::model::norm(t);
    let bound = f.sup_bound();
    let a = solve_cutoff(|a| kernel.weighted_tail(bound, center, a), opts.tail_tol)?;
    let tail = kernel.weighted_tail(bound, center, a)?;
    let (lo, hi) = kernel.support(a);
    let m = match kernel {
        Kernel::ExpMatrix { m, .. } => m.nrows(),
        _ => f.codim(),
    };
    let q = integrate_box(
        |xi: &[f64]| {
            let s: Vec<f64> = t.iter().zip(xi).map(|(a, b)| a - b).collect();
            // the domain is all of Rⁿ, checked above
            let e = f.eval_checked(&s).expect("full domain");
            let mut out = kernel.apply(xi, &e.value);
            out.push(kernel.norm_at(xi) * e.err);
            out
        },
        m + 1,
        &lo,
        &hi,
        Adaptive::new(opts.quad_tol).with_budget(opts.budget),
    )?;
    let mut value = q.value;
    let data_err = value.pop().unwrap_or(0.0).abs();
    Ok(ConvValue {
        err: tail + q.err_estimate + data_err,
        value,
        tail,
        cutoff: a,
    })
}

/// F(t) = ∫_{−∞}^t R(t − s) f(s) ds = ∫₀^∞ R(s) f(t − s) ds.
pub fn infinite_convolution(kernel: &Kernel, f: &FunctionHandle, t: f64, opts: ConvOptions) -> Result<ConvValue> {
    if !kernel.one_sided() {
        return Err(Error::Config("infinite convolution needs a kernel supported on [0, inf)".into()));
    }
    l1_convolution(kernel, f, &[t], opts)
}

/// Sides of ‖F(·+τ) − ρF(·)‖ ≤ ‖h‖₁·sup_{enlarged}‖f(·+τ) − ρf(·)‖ + tail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagationResult {
    pub lhs: DefectResult,
    pub data_defect: DefectResult,
    pub l1_norm: f64,
    pub tail_term: f64,
    /// Weight factor from the metric (window constant times sup ν).
    pub factor: f64,
    pub rhs: f64,
    pub rhs_slack: f64,
}

impl PropagationResult {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs.value <= self.rhs + self.rhs_slack + self.lhs.certified_slack + tol
    }
}

/// Checks that ρ passes through the convolution: linear maps must commute with
/// the kernel matrix, shifts need unit mass.
fn check_relation(kernel: &Kernel, rho: &Relation, codim: usize) -> Result<()> {
    let ok = match (rho, kernel) {
        (Relation::Identity | Relation::Zero, _) => true,
        (Relation::Shift(_), k) => k.scalar_mass().is_some_and(|c| (c - 1.0).abs() < 1e-12),
        (Relation::Scale(_) | Relation::Linear(_), Kernel::ExpMatrix { m, .. }) => {
            let a = rho.linear_matrix(codim)?;
            (&a * m - m * &a).amax() <= 1e-12 * (1.0 + a.amax() * m.amax())
        }
        (Relation::Scale(_) | Relation::Linear(_), _) => true,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!("relation {rho:?} does not commute with the kernel")))
    }
}

/// Metric factor k with defect ≤ k·sup‖·‖ for the specs the estimate covers.
pub(crate) fn metric_factor(spec: &MetricSpec, w: &CompactWindow) -> Result<f64> {
    if !matches!(spec.phi, Phi::Identity) {
        return Err(Error::Config("propagation estimates need phi = identity".into()));
    }
    let k = match &spec.weight {
        Weight::ConstOne => 1.0,
        Weight::ConstPerWindow(rule) => rule.value(w),
        Weight::Tabulated(_) => {
            return Err(Error::Config("propagation estimates need a constant weight".into()))
        }
    };
    match &spec.norm {
        Norm::Sup => Ok(k),
        Norm::WeightedSup(nu) => match nu.upper_bound {
            Some(b) => Ok(k * b),
            None => Err(Error::Config(
                "weighted sup with unbounded nu cannot carry the propagation estimate".into(),
            )),
        },
        _ => Err(Error::Config("propagation estimates need a sup-type norm".into())),
    }
}

/// Margin by which `enlarged` contains `w` on the sides the kernel reaches.
pub(crate) fn containment_margin(w: &CompactWindow, enlarged: &CompactWindow, one_sided: bool) -> Result<f64> {
    if !enlarged.contains_window(w) {
        return Err(Error::Config("the enlarged window must contain the window".into()));
    }
    let m = w
        .bounds()
        .zip(enlarged.bounds())
        .map(|((a, b), (c, d))| if one_sided { a - c } else { (a - c).min(d - b) })
        .fold(f64::INFINITY, f64::min);
    Ok(m)
}

/// Both sides of the propagation inequality for F = h ∗ f.
#[allow(clippy::too_many_arguments)]
pub fn propagation_check(
    kernel: &Kernel,
    f: &FunctionHandle,
    rho: &Relation,
    tau: &[f64],
    w: &CompactWindow,
    enlarged: &CompactWindow,
    spec: &MetricSpec,
    opts: ConvOptions,
) -> Result<PropagationResult> {
    check_data(kernel, f)?;
    let codim = match kernel {
        Kernel::ExpMatrix { m, .. } => m.nrows(),
        _ => f.codim(),
    };
    check_relation(kernel, rho, codim)?;
    let factor = metric_factor(spec, w)?;
    let margin = containment_margin(w, enlarged, kernel.one_sided())?;

    let grid = make_grid(w, f.domain())?;
    let lr = rho.lipschitz_bound();
    let samples = par::try_map_indexed(grid.len(), |i| -> Result<Sample> {
        let t = grid.point(i);
        let moved: Vec<f64> = t.iter().zip(tau).map(|(a, b)| a + b).collect();
        let at = l1_convolution(kernel, f, &t, opts)?;
        let sh = l1_convolution(kernel, f, &moved, opts)?;
        let y = rho.apply(&at.value)?;
        Ok(Sample {
            d: dist(&sh.value, &y),
            err: sh.err + lr * at.err,
        })
    })?;
    let lhs = defect_from_samples(&grid, w, spec, &samples, DefectOptions::default())?;

    let plain = MetricSpec::sup();
    let dopts = DefectOptions {
        integrand_lipschitz: integrand_lipschitz(f, rho, enlarged, &plain),
    };
    let data_defect = windowed_defect_with(f, rho, tau, enlarged, &plain, dopts)?;
    let l1 = kernel.l1_norm();
    // outside the margin: ‖f(t+τ−ξ) − ρ f(t−ξ)‖ ≤ (1+‖ρ‖)·B + ‖ρ(0)‖
    let reach = w.half_width() + crate::model::norm(tau);
    let grow = kernel.weighted_tail(f.sup_bound(), reach, margin)?;
    let tail_term = (1.0 + lr) * grow + rho.offset_norm() * kernel.tail(margin);
    let rhs = factor * (l1 * data_defect.value + tail_term);
    let rhs_slack = factor * l1 * data_defect.certified_slack;
    Ok(PropagationResult {
        lhs,
        data_defect,
        l1_norm: l1,
        tail_term,
        factor,
        rhs,
        rhs_slack,
    })
}
