//! Continued fractions and rational approximation.

use std::f64::consts::TAU;

/// A rational p/q with q > 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    pub p: i64,
    pub q: i64,
}

impl Fraction {
    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// Partial quotients a₀; a₁, a₂, … of `x`, stopping once the remainder is
/// numerically exhausted or `max_terms` quotients have been produced.
pub fn partial_quotients(x: f64, max_terms: usize) -> Vec<i64> {
    let mut out = Vec::new();
    let mut r = x;
    for _ in 0..max_terms {
        if !r.is_finite() || r.abs() > 1e15 {
            break;
        }
        let a = r.floor();
        out.push(a as i64);
        let frac = r - a;
        if frac < 1e-12 {
            break;
        }
        r = 1.0 / frac;
    }
    out
}

/// Convergents p_k/q_k of `x` with q_k ≤ q_max.
pub fn convergents(x: f64, q_max: i64) -> Vec<Fraction> {
    walk(x, q_max, false)
}

/// Convergents together with the intermediate fractions
/// (p_{k−1} + j p_k)/(q_{k−1} + j q_k), 1 ≤ j < a_{k+1}, sorted by denominator.
pub fn semiconvergents(x: f64, q_max: i64) -> Vec<Fraction> {
    walk(x, q_max, true)
}

fn walk(x: f64, q_max: i64, intermediate: bool) -> Vec<Fraction> {
    let a = partial_quotients(x, 64);
    let mut out = Vec::new();
    // (p_{-2}, q_{-2}) = (0, 1), (p_{-1}, q_{-1}) = (1, 0)
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    for &ak in &a {
        let ak = ak as i128;
        if intermediate && q1 > 0 {
            for j in 1..ak {
                let (p, q) = (p0 + j * p1, q0 + j * q1);
                if q > q_max as i128 {
                    break;
                }
                out.push(Fraction { p: p as i64, q: q as i64 });
            }
        }
        let (p2, q2) = (ak * p1 + p0, ak * q1 + q0);
        if q2 > q_max as i128 || p2.abs() > i64::MAX as i128 {
            break;
        }
        out.push(Fraction { p: p2 as i64, q: q2 as i64 });
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    out.sort_by_key(|f| (f.q, f.p));
    out.dedup();
    out
}

/// |x − 2πk| minimized over k ∈ ℤ.
pub fn dist_2pi(x: f64) -> f64 {
    (x - TAU * (x / TAU).round()).abs()
}

/// Distance from `x` to the nearest integer.
pub fn dist_int(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, SQRT_2};

    #[test]
    fn sqrt2_convergents() {
        let c: Vec<(i64, i64)> = convergents(SQRT_2, 200).iter().map(|f| (f.p, f.q)).collect();
        assert_eq!(c, vec![(1, 1), (3, 2), (7, 5), (17, 12), (41, 29), (99, 70), (239, 169)]);
    }

    #[test]
    fn pi_semiconvergents_include_intermediates() {
        let s = semiconvergents(PI, 120);
        let qs: Vec<i64> = s.iter().map(|f| f.q).collect();
        // 3/1, 22/7, then (3 + j·22)/(1 + j·7) for j = 1..14, then 333/106
        assert!(qs.contains(&7) && qs.contains(&106) && qs.contains(&8) && qs.contains(&99));
        assert!(s.iter().any(|f| (f.p, f.q) == (333, 106)));
    }

    #[test]
    fn rational_input_terminates() {
        assert_eq!(partial_quotients(0.75, 10), vec![0, 1, 3]);
        assert_eq!(convergents(0.75, 100).last(), Some(&Fraction { p: 3, q: 4 }));
    }

    #[test]
    fn mod_two_pi() {
        assert_eq!(dist_2pi(0.0), 0.0);
        assert!(dist_2pi(TAU * 5.0 + 0.1) - 0.1 < 1e-12);
        assert!((dist_2pi(-0.3) - 0.3).abs() < 1e-15);
        assert!((dist_2pi(PI) - PI).abs() < 1e-15);
    }
}
