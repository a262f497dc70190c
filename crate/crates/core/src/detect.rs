//! Almost-period scans, recurrence tables, Diophantine candidates, and
//! structural probes built on the defect functional.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::cfrac::{dist_2pi, dist_int, semiconvergents};
use crate::error::{Error, Result};
use crate::metric::{approx_error_with, windowed_defect_with, DefectOptions, DefectResult};
use crate::model::{
    axis_points, norm, CompactWindow, Evaluation, FnFunction, FunctionHandle, Grid, MetricSpec,
    Relation,
};
use crate::par;

/// Default cap on the number of shifts in a multi-axis scan.
pub const DEFAULT_SCAN_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub tau: Vec<f64>,
    pub defect: f64,
    pub slack: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityVerdict {
    /// Every ball of radius `max_gap` centred in the scan range meets the
    /// accepted set, and `max_gap` is small relative to the range.
    DenseWithinRange,
    NotDense,
    /// The scan hit its point budget; no verdict is drawn.
    Truncated,
}

/// Result of scanning a box of shifts for ε-almost periods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlmostPeriodReport {
    pub eps: f64,
    pub range: Vec<(f64, f64)>,
    pub step: f64,
    pub entries: Vec<ScanEntry>,
    /// 1-D: largest gap in lo, τ₁, …, τ_k, hi. n-D: covering radius of the
    /// accepted set over the scanned lattice. Infinite when nothing is accepted.
    pub max_gap: f64,
    pub verdict: DensityVerdict,
    pub truncated: bool,
}

impl AlmostPeriodReport {
    pub fn accepted(&self) -> impl Iterator<Item = &ScanEntry> {
        self.entries.iter().filter(|e| e.accepted)
    }

    pub fn accepted_taus(&self) -> Vec<Vec<f64>> {
        self.accepted().map(|e| e.tau.clone()).collect()
    }

    /// Same scan re-thresholded at another ε.
    pub fn with_eps(&self, eps: f64) -> AlmostPeriodReport {
        let entries: Vec<ScanEntry> = self
            .entries
            .iter()
            .map(|e| ScanEntry {
                accepted: e.defect <= eps,
                ..e.clone()
            })
            .collect();
        let (max_gap, verdict) = density(&self.range, self.step, &entries, self.truncated);
        AlmostPeriodReport {
            eps,
            entries,
            max_gap,
            verdict,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub budget: usize,
    pub defect: DefectOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: DEFAULT_SCAN_BUDGET,
            defect: DefectOptions::default(),
        }
    }
}

fn check_range(range: &[(f64, f64)], step: f64) -> Result<()> {
    if range.is_empty() {
        return Err(Error::Config("scan range has no axes".into()));
    }
    for (i, &(a, b)) in range.iter().enumerate() {
        if !(a.is_finite() && b.is_finite() && a <= b) {
            return Err(Error::Config(format!("scan range axis {i} is empty: [{a}, {b}]")));
        }
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Config(format!("scan step must be positive, got {step}")));
    }
    Ok(())
}

/// Evaluates the defect at every lattice shift of `range` (spacing `step`).
#[allow(clippy::too_many_arguments)]
pub fn scan_almost_periods(
    f: &FunctionHandle,
    rho: &Relation,
    eps: f64,
    w: &CompactWindow,
    spec: &MetricSpec,
    range: &[(f64, f64)],
    step: f64,
    opts: ScanOptions,
) -> Result<AlmostPeriodReport> {
    check_range(range, step)?;
    if range.len() != f.dim() {
        return Err(Error::Shape(format!(
            "scan range has {} axes, {} is defined on R^{}",
            range.len(),
            f.name(),
            f.dim()
        )));
    }
    let grid = Grid::from_axes(range.iter().map(|&(a, b)| axis_points(a, b, step)).collect());
    let truncated = grid.len() > opts.budget;
    let n = grid.len().min(opts.budget);
    let taus: Vec<Vec<f64>> = (0..n).map(|i| grid.point(i)).collect();
    if let Some(bad) = taus.iter().find(|t| !f.domain().admits_shift(t)) {
        return Err(Error::InvalidShift { tau: bad.clone() });
    }
    let defects = par::try_map_slice(&taus, |tau| {
        windowed_defect_with(f, rho, tau, w, spec, opts.defect)
    })?;
    let mut entries: Vec<ScanEntry> = taus
        .into_iter()
        .zip(defects)
        .map(|(tau, d)| ScanEntry {
            accepted: d.value <= eps,
            defect: d.value,
            slack: d.certified_slack,
            tau,
        })
        .collect();
    sort_by_magnitude(&mut entries);
    let (max_gap, verdict) = density(range, step, &entries, truncated);
    Ok(AlmostPeriodReport {
        eps,
        range: range.to_vec(),
        step,
        entries,
        max_gap,
        verdict,
        truncated,
    })
}

fn sort_by_magnitude(entries: &mut [ScanEntry]) {
    entries.sort_by(|a, b| {
        norm(&a.tau)
            .total_cmp(&norm(&b.tau))
            .then_with(|| {
                a.tau
                    .iter()
                    .zip(&b.tau)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
}

fn density(
    range: &[(f64, f64)],
    step: f64,
    entries: &[ScanEntry],
    truncated: bool,
) -> (f64, DensityVerdict) {
    let acc: Vec<&[f64]> = entries.iter().filter(|e| e.accepted).map(|e| e.tau.as_slice()).collect();
    if acc.is_empty() {
        let v = if truncated { DensityVerdict::Truncated } else { DensityVerdict::NotDense };
        return (f64::INFINITY, v);
    }
    let gap = if range.len() == 1 {
        let (lo, hi) = range[0];
        let mut xs: Vec<f64> = acc.iter().map(|t| t[0]).collect();
        xs.sort_by(f64::total_cmp);
        let inner = xs.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max);
        inner.max(xs[0] - lo).max(hi - xs[xs.len() - 1])
    } else {
        covering_radius(range, step, &acc)
    };
    let verdict = if truncated {
        DensityVerdict::Truncated
    } else {
        let scale = range.iter().map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
        // a ball of radius l is an interval of length 2l in one dimension
        let limit = if range.len() == 1 { scale / 2.0 } else { scale / 4.0 };
        if acc.len() >= 2 && gap <= limit {
            DensityVerdict::DenseWithinRange
        } else {
            DensityVerdict::NotDense
        }
    };
    (gap, verdict)
}

/// max over lattice points of the scan box of the distance to the nearest accepted shift.
fn covering_radius(range: &[(f64, f64)], step: f64, acc: &[&[f64]]) -> f64 {
    let grid = Grid::from_axes(range.iter().map(|&(a, b)| axis_points(a, b, step)).collect());
    let d = par::map_indexed(grid.len(), |i| {
        let p = grid.point(i);
        acc.iter()
            .map(|a| crate::model::dist(&p, a))
            .fold(f64::INFINITY, f64::min)
    });
    par::max_of(&d)
}

/// (l, dense-within-range) from a scan report.
pub fn relative_density(report: &AlmostPeriodReport) -> Result<(f64, bool)> {
    if report.accepted().next().is_none() {
        return Err(Error::NoPeriods);
    }
    Ok((report.max_gap, report.verdict == DensityVerdict::DenseWithinRange))
}

/// Defects of F along a shift sequence, one column per window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceTable {
    pub tau_seq: Vec<Vec<f64>>,
    pub windows: Vec<Vec<(f64, f64)>>,
    /// defects[k][j]: shift k on window j.
    pub defects: Vec<Vec<DefectResult>>,
}

impl RecurrenceTable {
    /// sup over windows and k′ ≥ k of the defect.
    pub fn uniform_tail(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.defects.len()];
        let mut run = 0.0f64;
        for (k, row) in self.defects.iter().enumerate().rev() {
            run = row.iter().map(|d| d.value).fold(run, f64::max);
            out[k] = run;
        }
        out
    }

    /// Per window: first k from which every later defect is ≤ eps.
    pub fn tail_index(&self, eps: f64) -> Vec<Option<usize>> {
        (0..self.windows.len())
            .map(|j| {
                let mut first = None;
                for k in (0..self.defects.len()).rev() {
                    if self.defects[k][j].value <= eps {
                        first = Some(k);
                    } else {
                        break;
                    }
                }
                first
            })
            .collect()
    }

    /// First k whose tail works for every supplied window at once.
    pub fn shared_tail_index(&self, eps: f64) -> Option<usize> {
        let tail = self.uniform_tail();
        let mut first = None;
        for k in (0..tail.len()).rev() {
            if tail[k] <= eps {
                first = Some(k);
            } else {
                break;
            }
        }
        first
    }
}

pub fn verify_recurrence(
    f: &FunctionHandle,
    rho: &Relation,
    tau_seq: &[Vec<f64>],
    windows: &[CompactWindow],
    spec: &MetricSpec,
) -> Result<RecurrenceTable> {
    verify_recurrence_with(f, rho, tau_seq, windows, spec, DefectOptions::default())
}

pub fn verify_recurrence_with(
    f: &FunctionHandle,
    rho: &Relation,
    tau_seq: &[Vec<f64>],
    windows: &[CompactWindow],
    spec: &MetricSpec,
    opts: DefectOptions,
) -> Result<RecurrenceTable> {
    if tau_seq.windows(2).any(|p| norm(&p[1]) <= norm(&p[0])) {
        return Err(Error::Precondition("|tau_k| must be strictly increasing".into()));
    }
    let defects = tau_seq
        .iter()
        .map(|tau| {
            windows
                .iter()
                .map(|w| windowed_defect_with(f, rho, tau, w, spec, opts))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RecurrenceTable {
        tau_seq: tau_seq.to_vec(),
        windows: windows.iter().map(|w| w.bounds().collect()).collect(),
        defects,
    })
}

/// Shifts τ = 2πp/λ₁ with dist(λ_l τ, 2πℤ) ≤ δ for every frequency, where p
/// runs over multiples of continued-fraction denominators of λ_l/λ₁, p ≤ p_max.
pub fn levitan_type1_candidates(freqs: &[f64], delta: f64, p_max: u64) -> Result<Vec<f64>> {
    if freqs.is_empty() {
        return Err(Error::Config("frequency list is empty".into()));
    }
    if !(delta > 0.0 && delta < std::f64::consts::PI) {
        return Err(Error::Config(format!("delta must lie in (0, pi), got {delta}")));
    }
    let base = match freqs.iter().find(|l| **l != 0.0) {
        Some(b) => b.abs(),
        None => return Err(Error::Config("all frequencies are zero".into())),
    };
    let ratios: Vec<f64> = freqs.iter().map(|l| l / base).collect();
    let q_max = p_max.min(i64::MAX as u64) as i64;
    let mut ps: Vec<u64> = Vec::new();
    let mut integral = true;
    for &r in &ratios {
        if r.fract() == 0.0 {
            continue;
        }
        integral = false;
        for fr in semiconvergents(r.abs(), q_max) {
            let q = fr.q as u64;
            let err = dist_int(q as f64 * r);
            let k_max = if err == 0.0 {
                p_max / q
            } else {
                ((delta / (TAU * err)).floor() as u64).min(p_max / q)
            };
            ps.extend((1..=k_max).map(|k| k * q));
        }
    }
    if integral {
        // all ratios are integers: every p works
        ps.extend(1..=p_max.min(1_000_000));
    }
    ps.sort_unstable();
    ps.dedup();
    Ok(ps
        .into_iter()
        .map(|p| TAU * p as f64 / base)
        .filter(|&tau| is_type1_shift(freqs, delta, tau))
        .collect())
}

/// The exact predicate: dist(λ_l τ, 2πℤ) ≤ δ for all l.
pub fn is_type1_shift(freqs: &[f64], delta: f64, tau: f64) -> bool {
    freqs.iter().all(|l| dist_2pi(l * tau) <= delta)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupVerdict {
    pub pass: bool,
    pub violator: Option<Vec<f64>>,
    pub violator_defect: Option<f64>,
    pub checked: usize,
}

/// Checks E ∪ (E + E) ∪ (E − E) ⊆ E(ε) element by element, then pairwise.
pub fn check_group_structure(
    e_eta: &[Vec<f64>],
    f: &FunctionHandle,
    rho: &Relation,
    eps: f64,
    w: &CompactWindow,
    spec: &MetricSpec,
) -> Result<GroupVerdict> {
    let mut shifts: Vec<Vec<f64>> = e_eta.to_vec();
    for i in 0..e_eta.len() {
        for j in i..e_eta.len() {
            let (a, b) = (&e_eta[i], &e_eta[j]);
            shifts.push(a.iter().zip(b).map(|(x, y)| x + y).collect());
            shifts.push(a.iter().zip(b).map(|(x, y)| x - y).collect());
            if i != j {
                shifts.push(b.iter().zip(a).map(|(x, y)| x - y).collect());
            }
        }
    }
    let defects = par::try_map_slice(&shifts, |tau| {
        windowed_defect_with(f, rho, tau, w, spec, DefectOptions::default())
    })?;
    for (tau, d) in shifts.iter().zip(&defects) {
        if d.value > eps {
            return Ok(GroupVerdict {
                pass: false,
                violator: Some(tau.clone()),
                violator_defect: Some(d.value),
                checked: shifts.len(),
            });
        }
    }
    Ok(GroupVerdict {
        pass: true,
        violator: None,
        violator_defect: None,
        checked: shifts.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityChain {
    pub indices: Vec<usize>,
    /// Always "greedy": the chain is a lower bound on the longest one.
    pub method: &'static str,
    pub pairwise: Vec<Vec<f64>>,
}

fn shifted(f: &FunctionHandle, b: &[f64]) -> Result<FunctionHandle> {
    if b.len() != f.dim() {
        return Err(Error::Shape(format!("shift of dimension {} for R^{}", b.len(), f.dim())));
    }
    if !f.domain().admits_shift(b) {
        return Err(Error::InvalidShift { tau: b.to_vec() });
    }
    let inner = f.clone();
    let b = b.to_vec();
    Ok(FnFunction::new(f.dim(), f.codim(), move |t: &[f64]| -> Evaluation {
        let s: Vec<f64> = t.iter().zip(&b).map(|(x, y)| x + y).collect();
        inner.eval_checked(&s).expect("admissible shift keeps points in the domain")
    })
    .with_domain(f.domain().clone())
    .into_handle(f.name()))
}

/// Greedy extraction of shifts whose translates are pairwise within `tol`.
pub fn normality_probe(
    f: &FunctionHandle,
    shifts: &[Vec<f64>],
    w: &CompactWindow,
    spec: &MetricSpec,
    tol: f64,
) -> Result<NormalityChain> {
    let handles = shifts
        .iter()
        .map(|b| shifted(f, b))
        .collect::<Result<Vec<_>>>()?;
    let m = handles.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let vals = par::try_map_slice(&pairs, |&(i, j)| {
        approx_error_with(&handles[i], &handles[j], w, spec, DefectOptions::default())
            .map(|d| d.value)
    })?;
    let mut pairwise = vec![vec![0.0; m]; m];
    for (&(i, j), v) in pairs.iter().zip(vals) {
        pairwise[i][j] = v;
        pairwise[j][i] = v;
    }
    let mut best: Vec<usize> = Vec::new();
    for start in 0..m {
        let mut chain = vec![start];
        for j in start + 1..m {
            if chain.iter().all(|&c| pairwise[c][j] <= tol) {
                chain.push(j);
            }
        }
        if chain.len() > best.len() {
            best = chain;
        }
    }
    Ok(NormalityChain {
        indices: best,
        method: "greedy",
        pairwise,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub tau: Vec<f64>,
    /// dist(ω·τ, 2πℤ).
    pub phase: f64,
    /// Euclidean distance from τ to ℤⁿ.
    pub lattice_distance: f64,
}

pub fn lattice_distance(tau: &[f64]) -> f64 {
    tau.iter().map(|x| dist_int(*x).powi(2)).sum::<f64>().sqrt()
}

/// τ lies in W = {|ω·τ| ≤ η mod 2π} but outside ℤⁿ + B_δ.
pub fn is_witness(omega: &[f64], eta: f64, delta: f64, tau: &[f64]) -> bool {
    let phase: f64 = omega.iter().zip(tau).map(|(a, b)| a * b).sum();
    dist_2pi(phase) <= eta && lattice_distance(tau) > delta
}

/// Grid search of `search_box` for the witness farthest from ℤⁿ; ties go to
/// the lexicographically smallest point.
pub fn bogolyubov_witness(
    omega: &[f64],
    eta: f64,
    delta: f64,
    search_box: &[(f64, f64)],
    search_step: f64,
) -> Result<Option<Witness>> {
    if omega.len() < 2 {
        return Err(Error::Precondition("the witness search needs n >= 2".into()));
    }
    if !(0.0..0.25).contains(&delta) {
        return Err(Error::Precondition(format!("delta must lie in [0, 1/4), got {delta}")));
    }
    if search_box.len() != omega.len() {
        return Err(Error::Shape(format!(
            "search box has {} axes, omega has {}",
            search_box.len(),
            omega.len()
        )));
    }
    check_range(search_box, search_step)?;
    let grid = Grid::from_axes(
        search_box
            .iter()
            .map(|&(a, b)| axis_points(a, b, search_step))
            .collect(),
    );
    let scores = par::map_indexed(grid.len(), |i| {
        let t = grid.point(i);
        if is_witness(omega, eta, delta, &t) {
            lattice_distance(&t)
        } else {
            f64::NEG_INFINITY
        }
    });
    // grid order is lexicographic, so the first maximum is the smallest point
    let mut best: Option<usize> = None;
    for (i, &s) in scores.iter().enumerate() {
        if s > f64::NEG_INFINITY && best.is_none_or(|b| s > scores[b]) {
            best = Some(i);
        }
    }
    Ok(best.map(|i| {
        let tau = grid.point(i);
        let phase = dist_2pi(omega.iter().zip(&tau).map(|(a, b)| a * b).sum());
        Witness {
            lattice_distance: scores[i],
            phase,
            tau,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupRow {
    pub length: f64,
    /// grid sup of ‖F‖ over a ≤ |t| ≤ L.
    pub outer: f64,
    /// grid sup of ‖F‖ over [−L, L].
    pub full: f64,
}

/// Grid suprema of ‖F‖ over {a ≤ |t| ≤ L} and [−L, L] for each L (1-D).
pub fn supremum_formula_check(
    f: &FunctionHandle,
    a: f64,
    lengths: &[f64],
    step: f64,
) -> Result<Vec<SupRow>> {
    if f.dim() != 1 {
        return Err(Error::Shape("supremum check is one-dimensional".into()));
    }
    let l_max = lengths.iter().copied().fold(0.0, f64::max);
    if !(a >= 0.0 && l_max >= a && step > 0.0) {
        return Err(Error::Config(format!("need 0 <= a <= max L and step > 0 (a={a}, L={l_max})")));
    }
    // |t| on a lattice from 0; both signs share it
    let rs = axis_points(0.0, l_max, step);
    let mags = par::try_map_slice(&rs, |&r| -> Result<f64> {
        let p = norm(&f.eval(&[r])?);
        let m = norm(&f.eval(&[-r])?);
        Ok(p.max(m))
    })?;
    lengths
        .iter()
        .map(|&l| {
            let mut outer = f64::NEG_INFINITY;
            let mut full = f64::NEG_INFINITY;
            for (r, m) in rs.iter().zip(&mags) {
                if *r > l {
                    break;
                }
                full = full.max(*m);
                if *r >= a {
                    outer = outer.max(*m);
                }
            }
            Ok(SupRow { length: l, outer, full })
        })
        .collect()
}
