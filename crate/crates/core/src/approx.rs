//! Least-squares trigonometric fitting and approximation tables.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::metric::{approx_error, DefectResult};
use crate::model::{make_grid, CompactWindow, FunctionHandle, MetricSpec, Norm, Weight};
use crate::par;
use crate::zoo::TrigPoly;

/// Largest acceptable singular-value ratio of the design matrix.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficient {
    pub freq: Vec<f64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub poly: TrigPoly,
    pub residual: DefectResult,
    pub condition: f64,
}

impl FitResult {
    pub fn coefficients(&self) -> Vec<Coefficient> {
        self.poly
            .freqs()
            .iter()
            .zip(self.poly.coeffs())
            .map(|(f, c)| Coefficient {
                freq: f.clone(),
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    /// Handle with the codomain of the fitted target.
    pub fn handle(&self, target_codim: usize) -> FunctionHandle {
        if target_codim == 1 {
            self.poly.real_handle("fit")
        } else {
            self.poly.handle("fit")
        }
    }
}

/// Fits Σ cⱼ e^{iλⱼ·t} to F on the grid of `w` by least squares (SVD solve).
/// Real targets are fitted as complex data with zero imaginary part and the
/// residual compares F with Re P.
pub fn fit_trig_poly(
    f: &FunctionHandle,
    w: &CompactWindow,
    freqs: &[Vec<f64>],
    spec: &MetricSpec,
) -> Result<FitResult> {
    if !matches!(spec.weight, Weight::ConstOne) || !matches!(spec.norm, Norm::Sup | Norm::L1) {
        return Err(Error::Config("fitting supports Sup or L1 norms with weight 1".into()));
    }
    if f.codim() > 2 {
        return Err(Error::Shape(format!(
            "{} has {} components; only real or complex targets can be fitted",
            f.name(),
            f.codim()
        )));
    }
    if freqs.is_empty() {
        return Err(Error::Shape("no frequencies to fit".into()));
    }
    if let Some(bad) = freqs.iter().find(|l| l.len() != f.dim()) {
        return Err(Error::Shape(format!(
            "frequency {bad:?} does not match the {}-dimensional domain",
            f.dim()
        )));
    }
    for i in 0..freqs.len() {
        for j in i + 1..freqs.len() {
            if freqs[i] == freqs[j] {
                return Err(Error::Conditioning {
                    condition: f64::INFINITY,
                    pair: (i, j),
                });
            }
        }
    }
    let grid = make_grid(w, f.domain())?;
    if grid.len() < freqs.len() {
        return Err(Error::Shape(format!(
            "{} grid points cannot determine {} coefficients",
            grid.len(),
            freqs.len()
        )));
    }
    let rows = par::try_map_indexed(grid.len(), |i| -> Result<(Vec<Complex64>, Complex64)> {
        let t = grid.point(i);
        let v = f.eval(&t)?;
        let target = Complex64::new(v[0], v.get(1).copied().unwrap_or(0.0));
        let row = freqs
            .iter()
            .map(|l| Complex64::from_polar(1.0, l.iter().zip(&t).map(|(a, b)| a * b).sum()))
            .collect();
        Ok((row, target))
    })?;
    let n = rows.len();
    let m = freqs.len();
    let a = DMatrix::from_fn(n, m, |i, j| rows[i].0[j]);
    let b = DVector::from_fn(n, |i, _| rows[i].1);

    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Conditioning {
            condition,
            pair: most_aliased_pair(&a),
        });
    }
    let c = svd
        .solve(&b, 0.0)
        .map_err(|e| Error::Conditioning {
            condition: f64::INFINITY,
            pair: (0, e.len().min(1)),
        })?;
    let poly = TrigPoly::new(freqs.to_vec(), c.iter().copied().collect())?;
    let fitted = if f.codim() == 1 {
        poly.real_handle("fit")
    } else {
        poly.handle("fit")
    };
    let residual = approx_error(f, &fitted, w, spec)?;
    Ok(FitResult {
        poly,
        residual,
        condition,
    })
}

/// Column pair with the largest normalized Gram entry |⟨aᵢ, aⱼ⟩|/(‖aᵢ‖‖aⱼ‖).
fn most_aliased_pair(a: &DMatrix<Complex64>) -> (usize, usize) {
    let m = a.ncols();
    let norms: Vec<f64> = (0..m).map(|j| a.column(j).norm()).collect();
    let mut best = (0, 1.min(m - 1));
    let mut best_val = -1.0;
    for i in 0..m {
        for j in i + 1..m {
            let g = a.column(i).dotc(&a.column(j)).norm() / (norms[i] * norms[j]);
            if g > best_val {
                best_val = g;
                best = (i, j);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxTable {
    pub windows: Vec<Vec<(f64, f64)>>,
    /// errors[k][j]: polynomial k on window j.
    pub errors: Vec<Vec<DefectResult>>,
    /// Per window: errors nonincreasing in k.
    pub monotone: Vec<bool>,
    /// Per window: final error ≤ threshold.
    pub final_below: Vec<bool>,
    pub pass: bool,
}

/// approx_error of each polynomial against F on each window.
pub fn levitan_strong_approx_check(
    f: &FunctionHandle,
    poly_seq: &[FunctionHandle],
    windows: &[CompactWindow],
    spec: &MetricSpec,
    threshold: f64,
) -> Result<ApproxTable> {
    if poly_seq.is_empty() {
        return Err(Error::Precondition("polynomial sequence is empty".into()));
    }
    let errors = poly_seq
        .iter()
        .map(|p| {
            windows
                .iter()
                .map(|w| approx_error(f, p, w, spec))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let monotone = (0..windows.len())
        .map(|j| errors.windows(2).all(|r| r[1][j].value <= r[0][j].value))
        .collect();
    let last = errors.last().expect("nonempty");
    let final_below: Vec<bool> = last.iter().map(|d| d.value <= threshold).collect();
    let pass = final_below.iter().all(|b| *b);
    Ok(ApproxTable {
        windows: windows.iter().map(|w| w.bounds().collect()).collect(),
        errors,
        monotone,
        final_below,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo;

    #[test]
    fn constant_fit() {
        let f = zoo::constant(1, vec![5.0]);
        let w = CompactWindow::interval(-1.0, 1.0, 0.1).unwrap();
        let r = fit_trig_poly(&f, &w, &[vec![0.0]], &MetricSpec::sup()).unwrap();
        assert!((r.poly.coeffs()[0] - Complex64::new(5.0, 0.0)).norm() < 1e-14);
        assert!(r.residual.value < 1e-14);
        assert_eq!(r.coefficients()[0].freq, vec![0.0]);
    }

    #[test]
    fn aliased_frequencies_named() {
        // on the integer lattice λ and λ + 2π give identical columns
        let f = zoo::constant(1, vec![1.0]);
        let w = CompactWindow::interval(0.0, 20.0, 1.0).unwrap();
        let freqs = vec![vec![0.0], vec![0.5], vec![0.5 + std::f64::consts::TAU]];
        match fit_trig_poly(&f, &w, &freqs, &MetricSpec::sup()) {
            Err(Error::Conditioning { pair, .. }) => assert_eq!(pair, (1, 2)),
            other => panic!("{other:?}"),
        }
    }
}
