//! Domain types shared by every other module: domains, windows and grids,
//! function handles with certified evaluation, relations and metric specs.

mod function;
mod region;
mod relation;
mod spec;
mod window;

pub use function::{dist, norm, Evaluation, FnFunction, Function, FunctionHandle, SupBound};
pub use region::{Interval, Region};
pub use relation::{apply_relation, Relation};
pub use spec::{MetricSpec, Norm, NuWeight, Phi, PointFn, Weight, WindowFn, WindowRule};
pub use window::{axis_points, make_grid, CompactWindow, Grid};

use crate::error::Result;

/// Free-function form of [`FunctionHandle::eval_checked`]: value and error bound.
pub fn eval_checked(f: &FunctionHandle, t: &[f64]) -> Result<(Vec<f64>, f64)> {
    f.eval_checked(t).map(|e| (e.value, e.err))
}
