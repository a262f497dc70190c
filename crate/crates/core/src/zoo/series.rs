use std::f64::consts::{LN_2, PI};

use crate::model::{Evaluation, Function, SupBound};

/// Stopping rule for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTruncation {
    pub tol: f64,
    /// Hard limit on the number of terms; when hit, the reported bound is the
    /// full certified tail and may exceed `tol`.
    pub term_cap: usize,
}

impl Default for SeriesTruncation {
    fn default() -> Self {
        SeriesTruncation {
            tol: 1e-12,
            term_cap: 200,
        }
    }
}

impl SeriesTruncation {
    pub fn with_tol(tol: f64) -> Self {
        SeriesTruncation {
            tol,
            ..Default::default()
        }
    }
}

/// x / 2^k without overflow in the power.
fn halve(x: f64, k: usize) -> f64 {
    x * 0.5f64.powi(k as i32)
}

fn sin2(x: f64) -> f64 {
    let s = x.sin();
    s * s
}

/// Σ_{m>M} c_m · min(1, (x/2^m)²) for coefficients c_m nonincreasing in m,
/// using Σ_{m>j} 4^{-m} = 4^{-j}/3 once the quadratic branch takes over.
fn certified_tail(x: f64, terms: usize, coef: impl Fn(usize) -> f64) -> f64 {
    let mut tail = 0.0;
    let mut m = terms;
    // terms with |x| ≥ 2^m contribute at most c_m each
    while halve(x, m + 1).abs() >= 1.0 {
        m += 1;
        tail += coef(m);
    }
    tail + coef(m + 1) * halve(x, m).powi(2) / 3.0
}

/// f(t) = Σ_{m≥1} (1/m) sin²(t/2^m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarauxSouplet {
    pub trunc: SeriesTruncation,
}

impl HarauxSouplet {
    pub fn new(trunc: SeriesTruncation) -> Self {
        HarauxSouplet { trunc }
    }

    pub fn partial_sum(&self, t: f64, terms: usize) -> f64 {
        (1..=terms).map(|m| sin2(halve(t, m)) / m as f64).sum()
    }

    /// Certified bound on Σ_{m>terms}, from |sin x| ≤ |x| and |sin x| ≤ 1.
    pub fn tail_bound(&self, t: f64, terms: usize) -> f64 {
        certified_tail(t, terms, |m| 1.0 / m as f64)
    }

    /// (value, error bound, terms used).
    pub fn series(&self, t: f64) -> (f64, f64, usize) {
        let mut s = 0.0;
        for m in 1..=self.trunc.term_cap {
            s += sin2(halve(t, m)) / m as f64;
            // quadratic tail, valid for every t: Σ_{k>m} (1/k)(t/2^k)² ≤ (t/2^m)²/(3(m+1))
            let quick = halve(t, m).powi(2) / (3.0 * (m as f64 + 1.0));
            if quick <= self.trunc.tol {
                return (s, quick, m);
            }
        }
        let cap = self.trunc.term_cap;
        (s, self.tail_bound(t, cap), cap)
    }
}

impl Function for HarauxSouplet {
    fn dim(&self) -> usize {
        1
    }
    fn codim(&self) -> usize {
        1
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        let (v, e, _) = self.series(t[0]);
        Evaluation::scalar(v, e)
    }
    fn sup_bound(&self) -> SupBound {
        // H_M + 1/3 with 2^M ≥ |t|, and ln M ≤ log2(1+|t|)
        SupBound::LogGrowth {
            c0: 4.0 / 3.0 + self.trunc.tol,
            c1: 1.0 / LN_2,
        }
    }
    fn lipschitz(&self) -> Option<f64> {
        // Σ 1/(m 2^m)
        Some(LN_2)
    }
}

/// φ(t) = Σ_{k≥1} sin²(πt/2^k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AitDadsPhi {
    pub trunc: SeriesTruncation,
}

impl AitDadsPhi {
    pub fn new(trunc: SeriesTruncation) -> Self {
        AitDadsPhi { trunc }
    }

    pub fn partial_sum(&self, t: f64, terms: usize) -> f64 {
        (1..=terms).map(|k| sin2(halve(PI * t, k))).sum()
    }

    pub fn tail_bound(&self, t: f64, terms: usize) -> f64 {
        certified_tail(PI * t, terms, |_| 1.0)
    }

    pub fn series(&self, t: f64) -> (f64, f64, usize) {
        let x = PI * t;
        let mut s = 0.0;
        for k in 1..=self.trunc.term_cap {
            s += sin2(halve(x, k));
            let quick = halve(x, k).powi(2) / 3.0;
            if quick <= self.trunc.tol {
                return (s, quick, k);
            }
        }
        let cap = self.trunc.term_cap;
        (s, self.tail_bound(t, cap), cap)
    }

    /// The two sums of φ(t + 2^l) = Σ_{k≤l} sin²(πt/2^k) + Σ_{k≥1} sin²(πt/2^{k+l} + π/2^k),
    /// each truncated with the same rule; returns (head, shifted tail, error bound).
    pub fn split(&self, t: f64, l: usize) -> (f64, f64, f64) {
        let head: f64 = (1..=l).map(|k| sin2(halve(PI * t, k))).sum();
        let mut rest = 0.0;
        let mut err = f64::INFINITY;
        for k in 1..=self.trunc.term_cap {
            rest += sin2(halve(PI * t, k + l) + halve(PI, k));
            // |sin(a+b)|² ≤ (|a|+|b|)²
            let remaining = (halve(PI * t, k + l).abs() + halve(PI, k)).powi(2) / 3.0;
            err = remaining;
            if remaining <= self.trunc.tol {
                break;
            }
        }
        (head, rest, err)
    }
}

impl Function for AitDadsPhi {
    fn dim(&self) -> usize {
        1
    }
    fn codim(&self) -> usize {
        1
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        let (v, e, _) = self.series(t[0]);
        Evaluation::scalar(v, e)
    }
    fn sup_bound(&self) -> SupBound {
        // M + π²/3 with 2^M ≥ |t|
        SupBound::LogGrowth {
            c0: 1.0 + PI * PI / 3.0 + self.trunc.tol,
            c1: 1.0 / LN_2,
        }
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_zero_vanish() {
        let hs = HarauxSouplet::new(SeriesTruncation::default());
        assert_eq!(hs.series(0.0).0, 0.0);
        let phi = AitDadsPhi::new(SeriesTruncation::default());
        assert_eq!(phi.series(0.0).0, 0.0);
    }

    #[test]
    fn phi_at_one_matches_direct_sum() {
        let phi = AitDadsPhi::new(SeriesTruncation::with_tol(1e-10));
        let (v, e, _) = phi.series(1.0);
        assert!(e <= 1e-10);
        // direct summation oracle: 200 terms, remaining tail < 1e-100
        let direct: f64 = (1..=200).map(|k| (PI / 2f64.powi(k)).sin().powi(2)).sum();
        assert!((v - direct).abs() <= e + 1e-15);
        assert!((v - 1.697_324_901_062_582_8).abs() < 1e-10);
    }

    #[test]
    fn tail_bound_covers_large_arguments() {
        let hs = HarauxSouplet::new(SeriesTruncation { tol: 1e-12, term_cap: 5 });
        let t = 1e4;
        let (v, e, n) = hs.series(t);
        assert_eq!(n, 5);
        let long = hs.partial_sum(t, 200);
        assert!((long - v).abs() <= e);
    }

    #[test]
    fn split_identity_reassembles_phi() {
        let phi = AitDadsPhi::new(SeriesTruncation::default());
        for &t in &[0.0, 0.3, 1.0, -2.5] {
            for l in [1usize, 4, 10] {
                let (h, r, e) = phi.split(t, l);
                let direct = phi.series(t + 2f64.powi(l as i32));
                assert!((h + r - direct.0).abs() <= e + direct.1 + 1e-12, "t={t} l={l}");
            }
        }
    }
}
