//! Numerical laboratory for Levitan almost periodicity and Bebutov recurrence
//! in general metrics.
//!
//! The crate evaluates explicitly constructed test functions with certified
//! truncation error ([`zoo`]), computes windowed almost-period defects under
//! configurable metric specifications ([`metric`]), scans and certifies
//! almost-period structure ([`detect`]), fits trigonometric polynomials
//! ([`approx`]) and checks how recurrence survives convolutions ([`conv`]) and
//! explicit PDE solution formulas ([`pde`]).

pub mod approx;
pub mod cfrac;
pub mod conv;
pub mod detect;
pub mod error;
pub mod metric;
pub mod model;
pub mod par;
pub mod pde;
pub mod quad;
pub mod zoo;

pub use error::{Error, Result};
pub use model::{
    apply_relation, eval_checked, make_grid, CompactWindow, FunctionHandle, MetricSpec, Norm,
    Phi, Region, Relation, SupBound, Weight,
};
