use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{Evaluation, Function, FunctionHandle, SupBound};

/// P(t) = Σⱼ cⱼ e^{i λⱼ·t} on ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    freqs: Vec<Vec<f64>>,
    coeffs: Vec<Complex64>,
    dim: usize,
}

impl TrigPoly {
    pub fn new(freqs: Vec<Vec<f64>>, coeffs: Vec<Complex64>) -> Result<Self> {
        if freqs.len() != coeffs.len() {
            return Err(Error::Shape(format!(
                "{} frequencies but {} coefficients",
                freqs.len(),
                coeffs.len()
            )));
        }
        let dim = freqs.first().map_or(1, Vec::len);
        if dim == 0 || freqs.iter().any(|f| f.len() != dim) {
            return Err(Error::Shape("frequencies must share one positive dimension".into()));
        }
        Ok(TrigPoly { freqs, coeffs, dim })
    }

    /// One-dimensional convenience constructor.
    pub fn from_scalar(freqs: &[f64], coeffs: Vec<Complex64>) -> Result<Self> {
        Self::new(freqs.iter().map(|&l| vec![l]).collect(), coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn freqs(&self) -> &[Vec<f64>] {
        &self.freqs
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn phase(freq: &[f64], t: &[f64]) -> f64 {
        freq.iter().zip(t).map(|(l, x)| l * x).sum()
    }

    pub fn value(&self, t: &[f64]) -> Complex64 {
        self.freqs
            .iter()
            .zip(&self.coeffs)
            .map(|(f, c)| c * Complex64::from_polar(1.0, Self::phase(f, t)))
            .sum()
    }

    /// ∂P/∂tₖ for each k.
    pub fn gradient(&self, t: &[f64]) -> Vec<Complex64> {
        let mut g = vec![Complex64::new(0.0, 0.0); self.dim];
        for (f, c) in self.freqs.iter().zip(&self.coeffs) {
            let e = c * Complex64::from_polar(1.0, Self::phase(f, t)) * Complex64::i();
            for (gk, lk) in g.iter_mut().zip(f) {
                *gk += e * lk;
            }
        }
        g
    }

    /// Σ|cⱼ|, a bound on sup |P|.
    pub fn coefficient_l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Σ|cⱼ||λⱼ|, a Lipschitz constant for P.
    pub fn lipschitz_bound(&self) -> f64 {
        self.freqs
            .iter()
            .zip(&self.coeffs)
            .map(|(f, c)| c.norm() * f.iter().map(|x| x * x).sum::<f64>().sqrt())
            .sum()
    }

    /// Handle returning (Re P, Im P).
    pub fn handle(&self, name: &str) -> FunctionHandle {
        FunctionHandle::new(name, ComplexView(self.clone()))
    }

    /// Handle returning Re P only.
    pub fn real_handle(&self, name: &str) -> FunctionHandle {
        FunctionHandle::new(name, RealView(self.clone()))
    }
}

struct ComplexView(TrigPoly);
struct RealView(TrigPoly);

impl Function for ComplexView {
    fn dim(&self) -> usize {
        self.0.dim
    }
    fn codim(&self) -> usize {
        2
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        let z = self.0.value(t);
        Evaluation::exact(vec![z.re, z.im])
    }
    fn sup_bound(&self) -> SupBound {
        SupBound::Bounded(self.0.coefficient_l1())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.0.lipschitz_bound())
    }
}

impl Function for RealView {
    fn dim(&self) -> usize {
        self.0.dim
    }
    fn codim(&self) -> usize {
        1
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        Evaluation::exact(vec![self.0.value(t).re])
    }
    fn sup_bound(&self) -> SupBound {
        SupBound::Bounded(self.0.coefficient_l1())
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(self.0.lipschitz_bound())
    }
}

/// Degree-M partial sum of the Haraux–Souplet series as a trigonometric
/// polynomial: sin²(t/2ᵐ) = 1/2 − (e^{iλt} + e^{−iλt})/4 with λ = 2^{1−m}.
pub fn haraux_souplet_partial(terms: usize) -> TrigPoly {
    dyadic_sin2_partial(terms, 1.0, |m| 1.0 / m as f64)
}

/// Degree-M partial sum of φ(t) = Σ sin²(πt/2ᵏ).
pub fn ait_dads_partial(terms: usize) -> TrigPoly {
    dyadic_sin2_partial(terms, std::f64::consts::PI, |_| 1.0)
}

fn dyadic_sin2_partial(terms: usize, scale: f64, coef: impl Fn(usize) -> f64) -> TrigPoly {
    let mut freqs = vec![0.0];
    let mut coeffs = vec![Complex64::new(
        (1..=terms).map(|m| coef(m) / 2.0).sum(),
        0.0,
    )];
    for m in 1..=terms {
        let lambda = scale * 2f64.powi(1 - m as i32);
        let c = Complex64::new(-coef(m) / 4.0, 0.0);
        freqs.extend([lambda, -lambda]);
        coeffs.extend([c, c]);
    }
    TrigPoly::from_scalar(&freqs, coeffs).expect("lengths match by construction")
}

/// F(t₁,…,tₙ) = f₁(t₁)···fₙ(tₙ) for scalar one-dimensional factors.
pub struct TensorProduct {
    factors: Vec<FunctionHandle>,
}

impl TensorProduct {
    pub fn new(factors: Vec<FunctionHandle>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Shape("tensor product needs at least one factor".into()));
        }
        if let Some(f) = factors.iter().find(|f| f.dim() != 1 || f.codim() != 1) {
            return Err(Error::Shape(format!(
                "tensor factor {} must be scalar and one-dimensional, is {}→{}",
                f.name(),
                f.dim(),
                f.codim()
            )));
        }
        Ok(TensorProduct { factors })
    }
}

impl Function for TensorProduct {
    fn dim(&self) -> usize {
        self.factors.len()
    }
    fn codim(&self) -> usize {
        1
    }
    fn domain(&self) -> crate::model::Region {
        crate::model::Region::product(
            self.factors.iter().map(|f| f.domain().axes()[0]).collect(),
        )
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        // |Πxᵢ − Πyᵢ| ≤ Π(|yᵢ|+eᵢ) − Π|yᵢ|
        let mut value = 1.0;
        let mut mag = 1.0;
        let mut widened = 1.0;
        for (f, &x) in self.factors.iter().zip(t) {
            let e = f.eval_checked(&[x]).expect("domain checked by the product region");
            let v = e.value[0];
            value *= v;
            mag *= v.abs();
            widened *= v.abs() + e.err;
        }
        Evaluation::scalar(value, widened - mag)
    }
    fn sup_bound(&self) -> SupBound {
        let bounds: Vec<SupBound> = self.factors.iter().map(|f| f.sup_bound()).collect();
        if bounds.iter().all(SupBound::is_bounded) {
            let m = bounds
                .iter()
                .map(|b| match b {
                    SupBound::Bounded(m) => *m,
                    _ => unreachable!(),
                })
                .product();
            SupBound::Bounded(m)
        } else {
            SupBound::Unbounded
        }
    }
}
