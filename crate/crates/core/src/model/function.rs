use std::fmt;
use std::sync::Arc;

use super::region::Region;
use crate::error::{Error, Result};

/// A value together with a bound on the Euclidean norm of its evaluation error.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: Vec<f64>,
    pub err: f64,
}

impl Evaluation {
    pub fn exact(value: Vec<f64>) -> Self {
        Evaluation { value, err: 0.0 }
    }

    pub fn scalar(x: f64, err: f64) -> Self {
        Evaluation {
            value: vec![x],
            err,
        }
    }
}

/// What is known about sup ‖F(t)‖ over the domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SupBound {
    Bounded(f64),
    /// ‖F(t)‖ ≤ c0 + c1·ln(1 + |t|).
    LogGrowth { c0: f64, c1: f64 },
    Unbounded,
}

impl SupBound {
    /// Bound on ‖F(t)‖ for |t| ≤ r.
    pub fn at_radius(&self, r: f64) -> f64 {
        match *self {
            SupBound::Bounded(m) => m,
            SupBound::LogGrowth { c0, c1 } => c0 + c1 * (1.0 + r.abs()).ln(),
            SupBound::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self, SupBound::Bounded(_))
    }

    pub fn is_finite_growth(&self) -> bool {
        !matches!(self, SupBound::Unbounded)
    }

    pub fn product(self, other: SupBound) -> SupBound {
        match (self, other) {
            (SupBound::Bounded(a), SupBound::Bounded(b)) => SupBound::Bounded(a * b),
            (SupBound::Bounded(a), SupBound::LogGrowth { c0, c1 })
            | (SupBound::LogGrowth { c0, c1 }, SupBound::Bounded(a)) => SupBound::LogGrowth {
                c0: a * c0,
                c1: a * c1,
            },
            _ => SupBound::Unbounded,
        }
    }
}

/// Evaluable map Λ ⊆ ℝⁿ → ℝᵐ. Implementors may assume `t` lies in the domain.
pub trait Function: Send + Sync {
    fn dim(&self) -> usize;
    fn codim(&self) -> usize;
    fn domain(&self) -> Region {
        Region::full(self.dim())
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation;
    fn sup_bound(&self) -> SupBound {
        SupBound::Unbounded
    }
    /// Global Lipschitz constant, when one is known.
    fn lipschitz(&self) -> Option<f64> {
        None
    }
}

/// Shared, immutable handle to a [`Function`].
#[derive(Clone)]
pub struct FunctionHandle {
    name: Arc<str>,
    inner: Arc<dyn Function>,
    domain: Region,
}

impl fmt::Debug for FunctionHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionHandle")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("codim", &self.codim())
            .finish()
    }
}

impl FunctionHandle {
    pub fn new(name: impl Into<Arc<str>>, f: impl Function + 'static) -> Self {
        let domain = f.domain();
        FunctionHandle {
            name: name.into(),
            inner: Arc::new(f),
            domain,
        }
    }

    /// Closure-backed handle on ℝⁿ, exact, with unknown bounds.
    pub fn from_fn<F>(name: &str, dim: usize, codim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        FnFunction::new(dim, codim, move |t| Evaluation::exact(f(t))).into_handle(name)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn codim(&self) -> usize {
        self.inner.codim()
    }

    pub fn domain(&self) -> &Region {
        &self.domain
    }

    pub fn sup_bound(&self) -> SupBound {
        self.inner.sup_bound()
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.inner.lipschitz()
    }

    /// Value at `t` with certified error bound.
    pub fn eval_checked(&self, t: &[f64]) -> Result<Evaluation> {
        if t.len() != self.dim() {
            return Err(Error::Shape(format!(
                "{} expects {}-dimensional points, got {}",
                self.name,
                self.dim(),
                t.len()
            )));
        }
        if !self.domain.contains(t) {
            return Err(Error::Domain { point: t.to_vec() });
        }
        Ok(self.inner.evaluate(t))
    }

    pub fn eval(&self, t: &[f64]) -> Result<Vec<f64>> {
        self.eval_checked(t).map(|e| e.value)
    }

    pub fn eval_scalar(&self, t: f64) -> Result<f64> {
        if self.codim() != 1 {
            return Err(Error::Shape(format!("{} is not scalar-valued", self.name)));
        }
        Ok(self.eval_checked(&[t])?.value[0])
    }

    pub fn err_bound(&self, t: &[f64]) -> Result<f64> {
        self.eval_checked(t).map(|e| e.err)
    }
}

/// Adapter turning a closure into a [`Function`].
pub struct FnFunction<F> {
    dim: usize,
    codim: usize,
    domain: Region,
    bound: SupBound,
    lipschitz: Option<f64>,
    f: F,
}

impl<F> FnFunction<F>
where
    F: Fn(&[f64]) -> Evaluation + Send + Sync + 'static,
{
    pub fn new(dim: usize, codim: usize, f: F) -> Self {
        FnFunction {
            dim,
            codim,
            domain: Region::full(dim),
            bound: SupBound::Unbounded,
            lipschitz: None,
            f,
        }
    }

    pub fn with_domain(mut self, domain: Region) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_bound(mut self, bound: SupBound) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn into_handle(self, name: &str) -> FunctionHandle {
        FunctionHandle::new(name, self)
    }
}

impl<F> Function for FnFunction<F>
where
    F: Fn(&[f64]) -> Evaluation + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn codim(&self) -> usize {
        self.codim
    }
    fn domain(&self) -> Region {
        self.domain.clone()
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        (self.f)(t)
    }
    fn sup_bound(&self) -> SupBound {
        self.bound
    }
    fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }
}

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_handle_is_exact() {
        let c = FunctionHandle::from_fn("c", 1, 1, |_| vec![3.0]);
        assert_eq!(c.eval_checked(&[1.5]).unwrap(), Evaluation::scalar(3.0, 0.0));
    }

    #[test]
    fn domain_is_enforced() {
        let f = FnFunction::new(1, 1, |t: &[f64]| Evaluation::exact(vec![t[0]]))
            .with_domain(Region::half_line())
            .into_handle("id+");
        assert_eq!(f.eval(&[-1.0]), Err(Error::Domain { point: vec![-1.0] }));
        assert!(matches!(f.eval(&[1.0, 2.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn log_growth_products() {
        let b = SupBound::Bounded(2.0).product(SupBound::LogGrowth { c0: 1.0, c1: 0.5 });
        assert_eq!(b, SupBound::LogGrowth { c0: 2.0, c1: 1.0 });
        assert_eq!(SupBound::Unbounded.product(SupBound::Bounded(1.0)), SupBound::Unbounded);
    }
}
