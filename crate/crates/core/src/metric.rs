//! The windowed defect functional and its direct-comparison variant.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    dist, make_grid, CompactWindow, Evaluation, FnFunction, FunctionHandle, Grid, MetricSpec,
    Norm, Phi, Relation, Weight,
};
use crate::par;

/// Outcome of one defect evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectResult {
    pub value: f64,
    pub grid_points: usize,
    /// Bound on |value − exact grid value| from evaluation errors, plus the
    /// grid-gap correction when an integrand Lipschitz constant was supplied.
    pub certified_slack: f64,
    /// No Lipschitz data: the value is a grid quantity, not a certified
    /// bound for the continuum.
    pub grid_limited: bool,
}

impl DefectResult {
    /// Acceptance at threshold ε: pure comparison of the grid value.
    pub fn accepts(&self, eps: f64) -> bool {
        self.value <= eps
    }

    /// Acceptance that survives the slack.
    pub fn certainly_below(&self, eps: f64) -> bool {
        self.value + self.certified_slack <= eps
    }

    pub fn upper(&self) -> f64 {
        self.value + self.certified_slack
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DefectOptions {
    /// Lipschitz constant of t ↦ g(t) (the weighted, φ-transformed sample).
    pub integrand_lipschitz: Option<f64>,
}

impl DefectOptions {
    pub fn with_lipschitz(l: f64) -> Self {
        DefectOptions {
            integrand_lipschitz: Some(l),
        }
    }
}

/// One grid sample: a distance and a bound on its error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub d: f64,
    pub err: f64,
}

pub fn windowed_defect(
    f: &FunctionHandle,
    rho: &Relation,
    tau: &[f64],
    w: &CompactWindow,
    spec: &MetricSpec,
) -> Result<DefectResult> {
    windowed_defect_with(f, rho, tau, w, spec, DefectOptions::default())
}

pub fn windowed_defect_with(
    f: &FunctionHandle,
    rho: &Relation,
    tau: &[f64],
    w: &CompactWindow,
    spec: &MetricSpec,
    opts: DefectOptions,
) -> Result<DefectResult> {
    if tau.len() != f.dim() {
        return Err(Error::Shape(format!(
            "shift has dimension {} but {} is defined on R^{}",
            tau.len(),
            f.name(),
            f.dim()
        )));
    }
    if !f.domain().admits_shift(tau) {
        return Err(Error::InvalidShift { tau: tau.to_vec() });
    }
    let grid = make_grid(w, f.domain())?;
    let lr = rho.lipschitz_bound();
    let samples = par::try_map_indexed(grid.len(), |i| {
        let t = grid.point(i);
        let shifted: Vec<f64> = t.iter().zip(tau).map(|(a, b)| a + b).collect();
        let at = f.eval_checked(&t)?;
        let moved = f.eval_checked(&shifted)?;
        let y = rho.apply(&at.value)?;
        Ok(Sample {
            d: dist(&moved.value, &y),
            err: moved.err + lr * at.err,
        })
    })?;
    defect_from_samples(&grid, w, spec, &samples, opts)
}

/// Defect of F − P under `spec` (τ = 0, no relation).
pub fn approx_error(
    f: &FunctionHandle,
    p: &FunctionHandle,
    w: &CompactWindow,
    spec: &MetricSpec,
) -> Result<DefectResult> {
    approx_error_with(f, p, w, spec, DefectOptions::default())
}

pub fn approx_error_with(
    f: &FunctionHandle,
    p: &FunctionHandle,
    w: &CompactWindow,
    spec: &MetricSpec,
    opts: DefectOptions,
) -> Result<DefectResult> {
    if f.dim() != p.dim() || f.codim() != p.codim() {
        return Err(Error::Shape(format!(
            "{} is R^{}→R^{} but {} is R^{}→R^{}",
            f.name(),
            f.dim(),
            f.codim(),
            p.name(),
            p.dim(),
            p.codim()
        )));
    }
    let grid = make_grid(w, f.domain())?;
    let samples = par::try_map_indexed(grid.len(), |i| {
        let t = grid.point(i);
        let a = f.eval_checked(&t)?;
        let b = p.eval_checked(&t)?;
        Ok(Sample {
            d: dist(&a.value, &b.value),
            err: a.err + b.err,
        })
    })?;
    defect_from_samples(&grid, w, spec, &samples, opts)
}

/// Applies weight, φ and the norm of `spec` to distances sampled on `grid`
/// (which must be the grid of `w` clipped to the relevant domain).
pub fn defect_from_samples(
    grid: &Grid,
    w: &CompactWindow,
    spec: &MetricSpec,
    samples: &[Sample],
    opts: DefectOptions,
) -> Result<DefectResult> {
    spec.validate()?;
    if grid.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let wc = spec.window_constant(w);
    // (g, slack of g) per point, with ν folded in for the weighted sup
    let weighted = par::try_map_indexed(samples.len(), |i| {
        let t = grid.point(i);
        let mut k = spec.weight_at(w, wc, &t)?;
        if let Norm::WeightedSup(nu) = &spec.norm {
            let v = (nu.f)(&t);
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("nu weight must be positive, got {v} at {t:?}")));
            }
            k *= v;
        }
        let s = samples[i];
        Ok((k * spec.phi.apply(s.d), k * spec.phi.slack(s.d, s.err)))
    })?;
    let (g, slack): (Vec<f64>, Vec<f64>) = weighted.into_iter().unzip();

    let gap = opts.integrand_lipschitz.map(|l| l * w.step_diameter() / 2.0);
    let (value, mut certified_slack) = match spec.norm {
        Norm::Sup | Norm::WeightedSup(_) => (par::max_of(&g), par::max_of(&slack)),
        Norm::ArctanSup => {
            let m = par::max_of(&g);
            (m.atan(), Phi::Arctan.slack(m, par::max_of(&slack)))
        }
        Norm::L1 => {
            let tw: Vec<f64> = (0..grid.len()).map(|i| grid.trapezoid_weight(i)).collect();
            let gw: Vec<f64> = g.iter().zip(&tw).map(|(a, b)| a * b).collect();
            let sw: Vec<f64> = slack.iter().zip(&tw).map(|(a, b)| a * b).collect();
            (par::pairwise_sum(&gw), par::pairwise_sum(&sw))
        }
    };
    if let Some(gap) = gap {
        certified_slack += match spec.norm {
            // each cell's integral and vertex average both sit within L·diam/2 of the centre value
            Norm::L1 => 2.0 * gap * clipped_volume(grid),
            _ => gap,
        };
    }
    if value.is_nan() {
        return Err(Error::Config("defect evaluated to NaN".into()));
    }
    Ok(DefectResult {
        value,
        grid_points: grid.len(),
        certified_slack,
        grid_limited: gap.is_none(),
    })
}

fn clipped_volume(grid: &Grid) -> f64 {
    grid.axes()
        .iter()
        .map(|ax| ax.last().unwrap() - ax.first().unwrap())
        .product()
}

/// Lipschitz constant of the integrand t ↦ 𝔽(t)·φ(‖F(t+τ) − ρ(F(t))‖) when it
/// follows from the data: φ 1-Lipschitz, weight constant on the window, F
/// Lipschitz. Weighted sup norms are excluded (ν has no Lipschitz data).
pub fn integrand_lipschitz(
    f: &FunctionHandle,
    rho: &Relation,
    w: &CompactWindow,
    spec: &MetricSpec,
) -> Option<f64> {
    let lf = f.lipschitz()?;
    if !matches!(spec.phi, Phi::Identity | Phi::Arctan) {
        return None;
    }
    let k = match &spec.weight {
        Weight::ConstOne => 1.0,
        Weight::ConstPerWindow(rule) => rule.value(w),
        Weight::Tabulated(_) => return None,
    };
    if matches!(spec.norm, Norm::WeightedSup(_)) {
        return None;
    }
    Some(k * lf * (1.0 + rho.lipschitz_bound()))
}

/// A map h on the codomain with Lipschitz constant `lipschitz`.
#[derive(Clone)]
pub struct LipschitzMap {
    pub h: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>,
    pub lipschitz: f64,
    pub out_dim: usize,
    /// h(c·y) = c·h(y) for c ≥ 0.
    pub positively_homogeneous: bool,
}

impl LipschitzMap {
    pub fn new(
        out_dim: usize,
        lipschitz: f64,
        positively_homogeneous: bool,
        h: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        LipschitzMap {
            h: Arc::new(h),
            lipschitz,
            out_dim,
            positively_homogeneous,
        }
    }
}

/// Both sides of defect(h∘F, τ) ≤ L·defect(F, τ) under the plain sup metric.
/// The second result is already scaled by L.
pub fn lipschitz_compose_check(
    f: &FunctionHandle,
    h: &LipschitzMap,
    rho: &Relation,
    tau: &[f64],
    w: &CompactWindow,
) -> Result<(DefectResult, DefectResult)> {
    if !(h.lipschitz >= 0.0 && h.lipschitz.is_finite()) {
        return Err(Error::Config(format!("Lipschitz constant must be finite and >= 0, got {}", h.lipschitz)));
    }
    match rho {
        Relation::Identity => {}
        Relation::Scale(c) if c.im == 0.0 && c.re >= 0.0 && h.positively_homogeneous => {}
        _ => {
            return Err(Error::Config(format!(
                "cannot compose with relation {rho:?}: h must commute with it"
            )))
        }
    }
    let spec = MetricSpec::sup();
    let inner = f.clone();
    let hm = h.clone();
    let composed = FnFunction::new(f.dim(), h.out_dim, move |t: &[f64]| {
        let e = inner.eval_checked(t).expect("grid points lie in the domain");
        Evaluation {
            value: (hm.h)(&e.value),
            err: hm.lipschitz * e.err,
        }
    })
    .with_domain(f.domain().clone())
    .into_handle(&format!("h∘{}", f.name()));
    let left = windowed_defect(&composed, rho, tau, w, &spec)?;
    let mut right = windowed_defect(f, rho, tau, w, &spec)?;
    right.value *= h.lipschitz;
    right.certified_slack *= h.lipschitz;
    Ok((left, right))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn exp_it() -> FunctionHandle {
        zoo::trig_poly(vec![vec![1.0]], vec![Complex64::new(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn exact_period() {
        let w = CompactWindow::interval(-5.0, 5.0, 0.01).unwrap();
        let r = windowed_defect(&exp_it(), &Relation::Identity, &[2.0 * PI], &w, &MetricSpec::sup()).unwrap();
        assert!(r.value < 1e-14);
        assert!(r.grid_limited);
        assert_eq!(r.grid_points, 1001);
    }

    #[test]
    fn shift_outside_half_line_rejected() {
        let f = zoo::kuchi_c0(3).unwrap();
        let w = CompactWindow::interval(0.0, 1.0, 0.1).unwrap();
        let e = windowed_defect(&f, &Relation::Identity, &[-1.0], &w, &MetricSpec::sup());
        assert_eq!(e, Err(Error::InvalidShift { tau: vec![-1.0] }));
        let w = CompactWindow::interval(-3.0, -1.0, 0.1).unwrap();
        let e = windowed_defect(&f, &Relation::Identity, &[1.0], &w, &MetricSpec::sup());
        assert_eq!(e, Err(Error::EmptyWindow));
    }

    #[test]
    fn lipschitz_adds_gap() {
        let w = CompactWindow::interval(0.0, 1.0, 0.1).unwrap();
        let f = exp_it();
        let spec = MetricSpec::sup();
        let l = integrand_lipschitz(&f, &Relation::Identity, &w, &spec).unwrap();
        assert_eq!(l, 2.0);
        let r = windowed_defect_with(&f, &Relation::Identity, &[1.0], &w, &spec, DefectOptions::with_lipschitz(l)).unwrap();
        assert!(!r.grid_limited);
        assert!((r.certified_slack - 0.1).abs() < 1e-15);
    }

    #[test]
    fn scale_single_frequency() {
        let w = CompactWindow::interval(-3.0, 3.0, 0.05).unwrap();
        let c = Complex64::new(0.3, -0.8);
        let coef = Complex64::new(1.5, 0.5);
        let lambda = 1.7;
        let f = zoo::trig_poly(vec![vec![lambda]], vec![coef]).unwrap();
        let tau = 0.9;
        let r = windowed_defect(&f, &Relation::Scale(c), &[tau], &w, &MetricSpec::sup()).unwrap();
        let exact = (Complex64::from_polar(1.0, lambda * tau) - c).norm() * coef.norm();
        assert!((r.value - exact).abs() < 1e-14);
    }
}
