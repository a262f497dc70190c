use std::f64::consts::{PI, SQRT_2};

use crate::model::{Evaluation, Function, Region, SupBound};

/// f(t) = 1/(2 + cos t + cos(√2 t)); continuous, unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LevitanReciprocal;

impl LevitanReciprocal {
    pub fn value(t: f64) -> f64 {
        1.0 / (2.0 + t.cos() + (SQRT_2 * t).cos())
    }
}

impl Function for LevitanReciprocal {
    fn dim(&self) -> usize {
        1
    }
    fn codim(&self) -> usize {
        1
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        Evaluation::scalar(Self::value(t[0]), 0.0)
    }
}

/// f(x) = n·3^{n+1}·sin(2πx) on [3ⁿ, 3ⁿ+1] + 2·3^{n+1}ℤ (n ≥ 1), zero elsewhere.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Nawrocki;

impl Nawrocki {
    /// The n whose window contains `x`, decided in integer arithmetic.
    pub fn window_index(x: f64) -> Option<u32> {
        if !x.is_finite() || x.abs() >= 2f64.powi(52) {
            return None;
        }
        let fl = x.floor();
        let xi = fl as i128;
        let on_lattice = x == fl;
        let bound = x.abs() as i128 + 1;
        let mut pow = 3i128;
        let mut n = 1u32;
        while pow <= bound {
            let period = 6 * pow;
            let r = (xi - pow).rem_euclid(period);
            // x - 3ⁿ ∈ [0,1] + period·ℤ  ⇔  floor offset 0, or 1 with zero fraction
            if r == 0 || (r == 1 && on_lattice) {
                return Some(n);
            }
            pow *= 3;
            n += 1;
        }
        None
    }

    pub fn value(x: f64) -> f64 {
        match Self::window_index(x) {
            Some(n) => {
                let frac = x - x.floor();
                n as f64 * 3f64.powi(n as i32 + 1) * (2.0 * PI * frac).sin()
            }
            None => 0.0,
        }
    }
}

impl Function for Nawrocki {
    fn dim(&self) -> usize {
        1
    }
    fn codim(&self) -> usize {
        1
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        Evaluation::scalar(Self::value(t[0]), 0.0)
    }
}

/// t ↦ ‖f(t)‖_{c₀} for f(t) = (4n²t²/(t²+n²)²)_{n≥1} on [0, ∞).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuchiC0 {
    pub n_max: usize,
}

/// Largest |g'| for g(x) = 4x²/(1+x²)², which bounds every |d/dt a_n(t)|.
const KUCHI_LIPSCHITZ: f64 = 1.74;

impl KuchiC0 {
    pub fn new(n_max: usize) -> Self {
        KuchiC0 { n_max: n_max.max(1) }
    }

    pub fn component(n: usize, t: f64) -> f64 {
        let n = n as f64;
        let d = t * t + n * n;
        4.0 * n * n * t * t / (d * d)
    }

    /// sup_n a_n(t). For n ≥ t the components decrease in n, so the max over
    /// n ≤ max(n_max, ⌈t⌉+1) is the exact supremum.
    pub fn norm_at(&self, t: f64) -> f64 {
        let last = self.n_max.max(t.ceil() as usize + 1);
        (1..=last).map(|n| Self::component(n, t)).fold(0.0, f64::max)
    }

    /// ‖f(s) − f(t)‖_{c₀} with a certified bound on the unexamined tail.
    pub fn diff_norm(&self, s: f64, t: f64) -> (f64, f64) {
        let big = s.abs().max(t.abs());
        let last = self.n_max.max((10.0 * big).ceil() as usize + 10);
        let value = (1..=last)
            .map(|n| (Self::component(n, s) - Self::component(n, t)).abs())
            .fold(0.0, f64::max);
        // for n > last ≥ max(s,t): |a_n(s) − a_n(t)| ≤ max(a_n(s), a_n(t)) ≤ 4·big²/n²
        let tail = 4.0 * big * big / ((last + 1) as f64).powi(2);
        (value, (tail - value).max(0.0))
    }
}

impl Function for KuchiC0 {
    fn dim(&self) -> usize {
        1
    }
    fn codim(&self) -> usize {
        1
    }
    fn domain(&self) -> Region {
        Region::half_line()
    }
    fn evaluate(&self, t: &[f64]) -> Evaluation {
        Evaluation::scalar(self.norm_at(t[0]), 0.0)
    }
    fn sup_bound(&self) -> SupBound {
        SupBound::Bounded(1.0)
    }
    fn lipschitz(&self) -> Option<f64> {
        Some(KUCHI_LIPSCHITZ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levitan_values() {
        assert_eq!(LevitanReciprocal::value(0.0), 0.25);
        let expect = 1.0 / (1.0 + (SQRT_2 * PI).cos());
        assert!((LevitanReciprocal::value(PI) - expect).abs() < 1e-15);
        assert!((LevitanReciprocal::value(PI) - 1.362_871_932_563_281).abs() < 1e-12);
    }

    #[test]
    fn levitan_minimum_at_zero_on_scan() {
        let min = (0..=200_000)
            .map(|i| LevitanReciprocal::value(-100.0 + i as f64 * 1e-3))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(min, 0.25);
    }

    #[test]
    fn nawrocki_spot_values() {
        assert_eq!(Nawrocki::value(0.0), 0.0);
        assert_eq!(Nawrocki::value(3.0), 0.0);
        assert!((Nawrocki::value(3.25) - 9.0).abs() < 1e-12);
        assert_eq!(Nawrocki::window_index(3.25), Some(1));
        assert_eq!(Nawrocki::window_index(27.5), Some(3));
        assert_eq!(Nawrocki::window_index(4.0), Some(1));
        assert_eq!(Nawrocki::window_index(4.0 + 1e-9), None);
        assert_eq!(Nawrocki::window_index(3.0 + 18.0), Some(1));
        assert_eq!(Nawrocki::window_index(3.0 - 18.0), Some(1));
        assert_eq!(Nawrocki::window_index(9.5), Some(2));
        assert_eq!(Nawrocki::window_index(9.5 + 54.0 * 7.0), Some(2));
        // 2·3^{n+1}: n = 2 → 54
        assert_eq!(Nawrocki::window_index(9.5 + 27.0), None);
    }

    #[test]
    fn kuchi_values() {
        let k = KuchiC0::new(10);
        assert_eq!(k.norm_at(0.0), 0.0);
        assert_eq!(k.norm_at(1.0), 1.0);
        // brute force over n ≤ 10^6
        for &t in &[0.3, 1.5, 7.25, 42.9] {
            let brute = (1..=1_000_000).map(|n| KuchiC0::component(n, t)).fold(0.0, f64::max);
            assert_eq!(k.norm_at(t), brute, "t={t}");
        }
    }

    #[test]
    fn kuchi_diff_norm_against_zero() {
        let k = KuchiC0::new(1);
        for &t in &[1.0, 2.5, 60.1] {
            let (v, e) = k.diff_norm(t, 0.0);
            assert!((v - k.norm_at(t)).abs() < 1e-15);
            assert_eq!(e, 0.0);
        }
    }
}
