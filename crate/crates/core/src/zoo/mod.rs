//! Explicit example functions with certified evaluation bounds.

mod closed;
mod series;
mod trig;

use num_complex::Complex64;

pub use closed::{KuchiC0, LevitanReciprocal, Nawrocki};
pub use series::{AitDadsPhi, HarauxSouplet, SeriesTruncation};
pub use trig::{ait_dads_partial, haraux_souplet_partial, TensorProduct, TrigPoly};

use crate::error::{Error, Result};
use crate::model::{Evaluation, FnFunction, FunctionHandle, SupBound};

/// Identifiers accepted by [`by_id`]-style lookups in front ends.
pub const IDS: &[&str] = &[
    "haraux-souplet",
    "ait-dads-phi",
    "levitan-reciprocal",
    "nawrocki",
    "kuchi-c0",
    "trig-poly",
    "tensor",
    "constant",
    "linear",
];

pub fn haraux_souplet(trunc: SeriesTruncation) -> FunctionHandle {
    FunctionHandle::new("haraux-souplet", HarauxSouplet::new(trunc))
}

pub fn ait_dads_phi(trunc: SeriesTruncation) -> FunctionHandle {
    FunctionHandle::new("ait-dads-phi", AitDadsPhi::new(trunc))
}

pub fn levitan_reciprocal() -> FunctionHandle {
    FunctionHandle::new("levitan-reciprocal", LevitanReciprocal)
}

pub fn nawrocki() -> FunctionHandle {
    FunctionHandle::new("nawrocki", Nawrocki)
}

pub fn kuchi_c0(n_max: usize) -> Result<FunctionHandle> {
    if n_max == 0 {
        return Err(Error::Config("kuchi-c0 needs n_max ≥ 1".into()));
    }
    Ok(FunctionHandle::new("kuchi-c0", KuchiC0::new(n_max)))
}

/// Complex-valued trigonometric polynomial, returned as (Re, Im).
pub fn trig_poly(freqs: Vec<Vec<f64>>, coeffs: Vec<Complex64>) -> Result<FunctionHandle> {
    Ok(TrigPoly::new(freqs, coeffs)?.handle("trig-poly"))
}

pub fn tensor_product(handles: Vec<FunctionHandle>) -> Result<FunctionHandle> {
    Ok(FunctionHandle::new("tensor", TensorProduct::new(handles)?))
}

/// Constant map ℝⁿ → ℝᵐ.
pub fn constant(dim: usize, value: Vec<f64>) -> FunctionHandle {
    let bound = crate::model::norm(&value);
    FnFunction::new(dim, value.len(), move |_: &[f64]| Evaluation::exact(value.clone()))
        .with_bound(SupBound::Bounded(bound))
        .with_lipschitz(0.0)
        .into_handle("constant")
}

/// t ↦ a·t + b on ℝ.
pub fn linear(a: f64, b: f64) -> FunctionHandle {
    FnFunction::new(1, 1, move |t: &[f64]| Evaluation::exact(vec![a * t[0] + b]))
        .with_lipschitz(a.abs())
        .into_handle("linear")
}
