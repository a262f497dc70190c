use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Single-valued relation ρ on the codomain.
#[derive(Debug, Clone, PartialEq)]
pub enum Relation {
    Identity,
    /// Multiplication by a complex scalar; on ℝ²-embedded values this is a
    /// rotation-scaling, on real scalars `c` must be real.
    Scale(Complex64),
    Shift(Vec<f64>),
    Linear(DMatrix<f64>),
    Zero,
}

impl Relation {
    pub fn scale_real(c: f64) -> Self {
        Relation::Scale(Complex64::new(c, 0.0))
    }

    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        match self {
            Relation::Identity => Ok(y.to_vec()),
            Relation::Zero => Ok(vec![0.0; y.len()]),
            Relation::Shift(b) => {
                if b.len() != y.len() {
                    return Err(Error::Shape(format!(
                        "shift has dimension {} but value has {}",
                        b.len(),
                        y.len()
                    )));
                }
                Ok(y.iter().zip(b).map(|(a, b)| a + b).collect())
            }
            Relation::Scale(c) => {
                if c.im == 0.0 {
                    return Ok(y.iter().map(|v| c.re * v).collect());
                }
                if y.len() != 2 {
                    return Err(Error::Shape(format!(
                        "non-real scale needs a complex (2-component) value, got {}",
                        y.len()
                    )));
                }
                let z = c * Complex64::new(y[0], y[1]);
                Ok(vec![z.re, z.im])
            }
            Relation::Linear(a) => {
                if a.ncols() != y.len() || a.nrows() != y.len() {
                    return Err(Error::Shape(format!(
                        "matrix is {}x{} but value has {} components",
                        a.nrows(),
                        a.ncols(),
                        y.len()
                    )));
                }
                Ok((0..a.nrows())
                    .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * y[j]).sum())
                    .collect())
            }
        }
    }

    /// Upper bound on the Lipschitz constant of y ↦ ρ(y) in the Euclidean norm.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Relation::Identity | Relation::Shift(_) => 1.0,
            Relation::Scale(c) => c.norm(),
            Relation::Linear(a) => a.norm(),
            Relation::Zero => 0.0,
        }
    }

    /// ‖ρ(0)‖: the constant offset of an affine relation.
    pub fn offset_norm(&self) -> f64 {
        match self {
            Relation::Shift(b) => super::function::norm(b),
            _ => 0.0,
        }
    }

    /// Matrix of the linear part acting on m-component values.
    pub fn linear_matrix(&self, m: usize) -> Result<DMatrix<f64>> {
        match self {
            Relation::Identity | Relation::Shift(_) => Ok(DMatrix::identity(m, m)),
            Relation::Zero => Ok(DMatrix::zeros(m, m)),
            Relation::Scale(c) if c.im == 0.0 => Ok(DMatrix::identity(m, m) * c.re),
            Relation::Scale(c) if m == 2 => Ok(DMatrix::from_row_slice(2, 2, &[c.re, -c.im, c.im, c.re])),
            Relation::Scale(_) => Err(Error::Shape("non-real scale on non-complex values".into())),
            Relation::Linear(a) if a.nrows() == m && a.ncols() == m => Ok(a.clone()),
            Relation::Linear(a) => Err(Error::Shape(format!(
                "matrix is {}x{}, values have {m} components",
                a.nrows(),
                a.ncols()
            ))),
        }
    }
}

/// Free-function form of [`Relation::apply`].
pub fn apply_relation(rho: &Relation, y: &[f64]) -> Result<Vec<f64>> {
    rho.apply(y)
}
