use serde::{Deserialize, Serialize};

/// Closed interval on one axis; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const HALF_LINE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }

    /// Shifts `tau` with `tau + self ⊆ self`.
    pub fn admits_shift(&self, tau: f64) -> bool {
        let lo_ok = self.lo == f64::NEG_INFINITY || tau >= 0.0;
        let hi_ok = self.hi == f64::INFINITY || tau <= 0.0;
        lo_ok && hi_ok
    }
}

/// Domain Λ as a product of intervals/half-lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    axes: Vec<Interval>,
}

impl Region {
    pub fn full(n: usize) -> Self {
        Region {
            axes: vec![Interval::REAL_LINE; n],
        }
    }

    pub fn half_line() -> Self {
        Region {
            axes: vec![Interval::HALF_LINE],
        }
    }

    pub fn product(axes: Vec<Interval>) -> Self {
        Region { axes }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Interval] {
        &self.axes
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        t.len() == self.axes.len() && self.axes.iter().zip(t).all(|(ax, &x)| ax.contains(x))
    }

    /// Membership of `tau` in Λ″ = {τ : τ + Λ ⊆ Λ}.
    pub fn admits_shift(&self, tau: &[f64]) -> bool {
        tau.len() == self.axes.len()
            && self
                .axes
                .iter()
                .zip(tau)
                .all(|(ax, &s)| ax.admits_shift(s))
    }

    pub fn is_full(&self) -> bool {
        self.axes.iter().all(|a| *a == Interval::REAL_LINE)
    }
}
