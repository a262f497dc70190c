//! Quadrature rules: Gauss–Jacobi (and Legendre as its α=β=0 case), composite
//! adaptive Gauss–Legendre on intervals and boxes, and rules on the unit
//! sphere and the unit disk with the 1/√(1−|σ|²) weight.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::par;

/// Nodes and weights on [-1, 1] for the weight (1-x)^α (1+x)^β.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// P_n^{(α,β)}(x) and its derivative via the three-term recurrence.
fn jacobi_with_derivative(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    let eval = |n: usize, a: f64, b: f64| -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mut p0 = 1.0;
        let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
        for k in 2..=n {
            let k = k as f64;
            let s = 2.0 * k + a + b;
            let c1 = 2.0 * k * (k + a + b) * (s - 2.0);
            let c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
            let c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
            let p2 = (c2 * p1 - c3 * p0) / c1;
            p0 = p1;
            p1 = p2;
        }
        p1
    };
    let p = eval(n, alpha, beta);
    let dp = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + beta + 1.0) * eval(n - 1, alpha + 1.0, beta + 1.0)
    };
    (p, dp)
}

/// n-point Gauss–Jacobi rule: Golub–Welsch start, Newton-polished nodes,
/// weights from the closed-form derivative formula.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Rule> {
    if n == 0 || !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Config(format!(
            "gauss_jacobi needs n >= 1 and alpha, beta > -1 (got n={n}, alpha={alpha}, beta={beta})"
        )));
    }
    let ab = alpha + beta;
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        j[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s = 2.0 * kf + ab + 2.0;
            let b = 2.0 / s
                * (k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab) / ((s + 1.0) * (s - 1.0))).sqrt();
            j[(k, k + 1)] = b;
            j[(k + 1, k)] = b;
        }
    }
    let eig = SymmetricEigen::new(j);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    let nf = n as f64;
    let log_c = (ab + 1.0) * 2f64.ln() + ln_gamma(nf + alpha + 1.0) + ln_gamma(nf + beta + 1.0)
        - ln_gamma(nf + ab + 1.0)
        - ln_gamma(nf + 1.0);
    let c = log_c.exp();
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let (p, dp) = jacobi_with_derivative(n, alpha, beta, *x);
            let dx = p / dp;
            *x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = jacobi_with_derivative(n, alpha, beta, *x);
        weights.push(c / ((1.0 - *x * *x) * dp * dp));
    }
    Ok(Rule { nodes, weights })
}

pub fn gauss_legendre(n: usize) -> Rule {
    gauss_jacobi(n, 0.0, 0.0).expect("legendre parameters are valid")
}

/// Order of the per-panel rule used by the composite integrators.
pub const PANEL_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadResult {
    pub value: Vec<f64>,
    /// |I_2n − I_n| at the accepted refinement level.
    pub err_estimate: f64,
    pub evals: usize,
}

/// Options for the doubling composite rule.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub tol: f64,
    pub initial_panels: usize,
    /// Upper limit on integrand evaluations.
    pub budget: usize,
}

impl Adaptive {
    pub fn new(tol: f64) -> Self {
        Adaptive {
            tol,
            initial_panels: 8,
            budget: 4_000_000,
        }
    }

    pub fn with_panels(mut self, p: usize) -> Self {
        self.initial_panels = p.max(1);
        self
    }

    pub fn with_budget(mut self, b: usize) -> Self {
        self.budget = b;
        self
    }
}

fn composite_once<F>(f: &F, dim: usize, a: f64, b: f64, panels: usize, rule: &Rule) -> Vec<f64>
where
    F: Fn(f64) -> Vec<f64> + Sync + Send,
{
    let h = (b - a) / panels as f64;
    let m = rule.nodes.len();
    let samples = par::map_indexed(panels * m, |i| {
        let (p, k) = (i / m, i % m);
        let x = a + h * (p as f64 + 0.5 * (rule.nodes[k] + 1.0));
        let w = 0.5 * h * rule.weights[k];
        f(x).into_iter().map(|v| v * w).collect::<Vec<f64>>()
    });
    (0..dim)
        .map(|c| {
            let col: Vec<f64> = samples.iter().map(|s| s[c]).collect();
            par::pairwise_sum(&col)
        })
        .collect()
}

/// ∫_a^b f for vector-valued `f` with `dim` components; panel count doubles
/// until successive estimates agree to `opts.tol` in max norm.
pub fn integrate_vec<F>(f: F, dim: usize, a: f64, b: f64, opts: Adaptive) -> Result<QuadResult>
where
    F: Fn(f64) -> Vec<f64> + Sync + Send,
{
    if a == b {
        return Ok(QuadResult {
            value: vec![0.0; dim],
            err_estimate: 0.0,
            evals: 0,
        });
    }
    let rule = gauss_legendre(PANEL_ORDER);
    let mut panels = opts.initial_panels.max(1);
    let mut prev = composite_once(&f, dim, a, b, panels, &rule);
    let mut evals = panels * PANEL_ORDER;
    loop {
        panels *= 2;
        evals += panels * PANEL_ORDER;
        if evals > opts.budget {
            return Err(Error::Budget(format!(
                "quadrature on [{a}, {b}] did not reach tol {} within {} evaluations",
                opts.tol, opts.budget
            )));
        }
        let next = composite_once(&f, dim, a, b, panels, &rule);
        let diff = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if diff <= opts.tol {
            return Ok(QuadResult {
                value: next,
                err_estimate: diff,
                evals,
            });
        }
        prev = next;
    }
}

pub fn integrate<F>(f: F, a: f64, b: f64, opts: Adaptive) -> Result<(f64, f64)>
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let r = integrate_vec(|x| vec![f(x)], 1, a, b, opts)?;
    Ok((r.value[0], r.err_estimate))
}

fn box_once<F>(f: &F, dim: usize, lo: &[f64], hi: &[f64], panels: usize, rule: &Rule) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let n = lo.len();
    let m = rule.nodes.len();
    let per_axis = panels * m;
    let total = per_axis.pow(n as u32);
    let samples = par::map_indexed(total, |mut i| {
        let mut x = vec![0.0; n];
        let mut w = 1.0;
        for ax in (0..n).rev() {
            let j = i % per_axis;
            i /= per_axis;
            let (p, k) = (j / m, j % m);
            let h = (hi[ax] - lo[ax]) / panels as f64;
            x[ax] = lo[ax] + h * (p as f64 + 0.5 * (rule.nodes[k] + 1.0));
            w *= 0.5 * h * rule.weights[k];
        }
        f(&x).into_iter().map(|v| v * w).collect::<Vec<f64>>()
    });
    (0..dim)
        .map(|c| {
            let col: Vec<f64> = samples.iter().map(|s| s[c]).collect();
            par::pairwise_sum(&col)
        })
        .collect()
}

/// Tensor composite Gauss–Legendre over a box, doubling panels per axis.
pub fn integrate_box<F>(f: F, dim: usize, lo: &[f64], hi: &[f64], opts: Adaptive) -> Result<QuadResult>
where
    F: Fn(&[f64]) -> Vec<f64> + Sync + Send,
{
    let n = lo.len();
    let order = if n == 1 { PANEL_ORDER } else { 8 };
    let rule = gauss_legendre(order);
    let mut panels = opts.initial_panels.max(1);
    let cost = |p: usize| (p * order).pow(n as u32);
    let mut evals = cost(panels);
    if evals > opts.budget {
        return Err(Error::Budget(format!("initial box rule needs {evals} evaluations")));
    }
    let mut prev = box_once(&f, dim, lo, hi, panels, &rule);
    loop {
        panels *= 2;
        evals += cost(panels);
        if evals > opts.budget {
            return Err(Error::Budget(format!(
                "box quadrature did not reach tol {} within {} evaluations",
                opts.tol, opts.budget
            )));
        }
        let next = box_once(&f, dim, lo, hi, panels, &rule);
        let diff = prev
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max);
        if diff <= opts.tol {
            return Ok(QuadResult {
                value: next,
                err_estimate: diff,
                evals,
            });
        }
        prev = next;
    }
}

/// Points ω and weights on the unit sphere S^{n-1}, n ∈ {1, 2, 3}; weights
/// sum to the surface measure (2, 2π, 4π).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// `resolution` is the Gauss–Legendre order in cos θ for S², the number of
    /// trapezoid points for S¹ and ignored for S⁰.
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        let resolution = resolution.max(1);
        match n {
            1 => Ok(SphereRule {
                points: vec![vec![-1.0], vec![1.0]],
                weights: vec![1.0, 1.0],
            }),
            2 => {
                let m = resolution.max(3);
                let h = 2.0 * PI / m as f64;
                Ok(SphereRule {
                    points: (0..m)
                        .map(|k| {
                            let a = h * k as f64;
                            vec![a.cos(), a.sin()]
                        })
                        .collect(),
                    weights: vec![h; m],
                })
            }
            3 => {
                let gl = gauss_legendre(resolution);
                let m_phi = 2 * resolution;
                let h = 2.0 * PI / m_phi as f64;
                let mut points = Vec::with_capacity(resolution * m_phi);
                let mut weights = Vec::with_capacity(resolution * m_phi);
                for (z, w) in gl.nodes.iter().zip(&gl.weights) {
                    let s = (1.0 - z * z).sqrt();
                    for k in 0..m_phi {
                        let a = h * (k as f64 + 0.5);
                        points.push(vec![s * a.cos(), s * a.sin(), *z]);
                        weights.push(w * h);
                    }
                }
                Ok(SphereRule { points, weights })
            }
            _ => Err(Error::Config(format!("sphere rules exist for n = 1, 2, 3, not {n}"))),
        }
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Rule for ∫_{B₁} F(σ)/√(1−|σ|²) dσ on the unit disk: radial Gauss–Jacobi
/// (α = −1/2 absorbs the rim singularity) times an azimuthal trapezoid.
/// The weights sum to 2π.
#[derive(Debug, Clone, PartialEq)]
pub struct DiskRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
}

impl DiskRule {
    pub fn new(radial: usize, azimuthal: usize) -> Result<Self> {
        // r = (1+x)/2 on [0,1]: r dr/√(1-r²) = (1-x)^{-1/2} · (1+x)/(2√(3+x)) dx
        let gj = gauss_jacobi(radial, -0.5, 0.0)?;
        let m = azimuthal.max(3);
        let h = 2.0 * PI / m as f64;
        let mut points = Vec::with_capacity(radial * m);
        let mut weights = Vec::with_capacity(radial * m);
        for (x, w) in gj.nodes.iter().zip(&gj.weights) {
            let r = 0.5 * (1.0 + x);
            let wr = w * (1.0 + x) / (2.0 * (3.0 + x).sqrt());
            for k in 0..m {
                let a = h * (k as f64 + 0.5);
                points.push([r * a.cos(), r * a.sin()]);
                weights.push(wr * h);
            }
        }
        Ok(DiskRule { points, weights })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10);
        for deg in 0..20 {
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(deg)).sum();
            assert!((q - exact).abs() < 1e-14, "deg {deg}: {q} vs {exact}");
        }
    }

    #[test]
    fn jacobi_mass_and_moments() {
        // ∫_{-1}^{1} (1-x)^{-1/2} x^k dx against a fine substitution x = 1 - u².
        for n in [1usize, 2, 5, 9, 20] {
            let r = gauss_jacobi(n, -0.5, 0.0).unwrap();
            let mass: f64 = r.weights.iter().sum();
            assert_relative_eq!(mass, 2.0 * 2f64.sqrt(), epsilon = 1e-13);
            for k in 0..(2 * n).min(12) {
                let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                // ∫_0^{√2} 2 (1-u²)^k du
                let (oracle, _) =
                    integrate(|u| 2.0 * (1.0 - u * u).powi(k as i32), 0.0, 2f64.sqrt(), Adaptive::new(1e-14))
                        .unwrap();
                assert!((q - oracle).abs() < 1e-12, "n={n} k={k}: {q} vs {oracle}");
            }
        }
    }

    #[test]
    fn odd_degree_asymmetric_rule_has_no_forced_zero_node() {
        let r = gauss_jacobi(5, -0.5, 0.0).unwrap();
        assert!(r.nodes.iter().all(|x| x.abs() > 1e-3));
    }

    #[test]
    fn adaptive_matches_closed_form() {
        let (v, _) = integrate(|x| (-x).exp() * x.cos(), 0.0, 40.0, Adaptive::new(1e-13)).unwrap();
        // ∫_0^∞ e^{-x} cos x dx = 1/2, tail e^{-40} negligible
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let r = integrate(|x| (1e4 * x).sin(), 0.0, 100.0, Adaptive::new(1e-14).with_budget(5_000));
        assert!(matches!(r, Err(Error::Budget(_))));
    }

    #[test]
    fn sphere_and_disk_measures() {
        assert_relative_eq!(SphereRule::new(3, 12).unwrap().measure(), 4.0 * PI, epsilon = 1e-12);
        assert_relative_eq!(SphereRule::new(2, 40).unwrap().measure(), 2.0 * PI, epsilon = 1e-12);
        let d = DiskRule::new(12, 24).unwrap();
        assert_relative_eq!(d.weights.iter().sum::<f64>(), 2.0 * PI, epsilon = 1e-12);
        // ∫ |σ|² /√(1-|σ|²) = 2π ∫ r³/√(1-r²) dr = 2π·2/3
        let m2: f64 = d.points.iter().zip(&d.weights).map(|(p, w)| w * (p[0] * p[0] + p[1] * p[1])).sum();
        assert_relative_eq!(m2, 4.0 * PI / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn box_rule_gaussian_mass() {
        let r = integrate_box(
            |x| vec![(-(x[0] * x[0] + x[1] * x[1])).exp()],
            1,
            &[-8.0, -8.0],
            &[8.0, 8.0],
            Adaptive::new(1e-12).with_panels(2),
        )
        .unwrap();
        assert_relative_eq!(r.value[0], PI, epsilon = 1e-10);
    }
}
