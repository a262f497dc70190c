use std::fmt;
use std::sync::Arc;

use super::window::CompactWindow;
use crate::error::{Error, Result};

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type WindowFn = Arc<dyn Fn(&CompactWindow) -> f64 + Send + Sync>;

/// Monotone transform φ applied to pointwise distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Phi {
    Identity,
    Power(f64),
    Arctan,
}

impl Phi {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Phi::Identity => x,
            Phi::Power(p) => x.powf(p),
            Phi::Arctan => x.atan(),
        }
    }

    /// Largest change of φ when its argument moves by at most `e` from `x ≥ 0`.
    pub fn slack(&self, x: f64, e: f64) -> f64 {
        if e == 0.0 {
            return 0.0;
        }
        let up = self.apply(x + e) - self.apply(x);
        let down = self.apply(x) - self.apply((x - e).max(0.0));
        up.max(down).max(0.0)
    }
}

/// Rule producing the constant weight 𝔽_K from the window K.
#[derive(Clone)]
pub enum WindowRule {
    /// N^exponent where N is the window half-width (K ⊆ [-N, N]ⁿ).
    HalfWidthPower { exponent: f64 },
    Custom(WindowFn),
}

impl WindowRule {
    pub fn value(&self, w: &CompactWindow) -> f64 {
        match self {
            WindowRule::HalfWidthPower { exponent } => w.half_width().powf(*exponent),
            WindowRule::Custom(f) => f(w),
        }
    }
}

impl fmt::Debug for WindowRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowRule::HalfWidthPower { exponent } => write!(f, "HalfWidthPower({exponent})"),
            WindowRule::Custom(_) => write!(f, "Custom"),
        }
    }
}

#[derive(Clone)]
pub enum Weight {
    ConstOne,
    ConstPerWindow(WindowRule),
    Tabulated(PointFn),
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::ConstOne => write!(f, "ConstOne"),
            Weight::ConstPerWindow(r) => write!(f, "ConstPerWindow({r:?})"),
            Weight::Tabulated(_) => write!(f, "Tabulated"),
        }
    }
}

/// Pointwise multiplier ν for weighted sup norms; `upper_bound` is `None`
/// when ν is not known to be bounded.
#[derive(Clone)]
pub struct NuWeight {
    pub f: PointFn,
    pub upper_bound: Option<f64>,
}

impl NuWeight {
    pub fn new(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, upper_bound: Option<f64>) -> Self {
        NuWeight {
            f: Arc::new(f),
            upper_bound,
        }
    }
}

#[derive(Clone)]
pub enum Norm {
    Sup,
    WeightedSup(NuWeight),
    L1,
    ArctanSup,
}

impl fmt::Debug for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Sup => write!(f, "Sup"),
            Norm::WeightedSup(nu) => write!(f, "WeightedSup(bound={:?})", nu.upper_bound),
            Norm::L1 => write!(f, "L1"),
            Norm::ArctanSup => write!(f, "ArctanSup"),
        }
    }
}

/// (φ, 𝔽_K, 𝒫_K): everything the defect functional needs besides ρ.
#[derive(Debug, Clone)]
pub struct MetricSpec {
    pub phi: Phi,
    pub weight: Weight,
    pub norm: Norm,
}

impl Default for MetricSpec {
    fn default() -> Self {
        MetricSpec::sup()
    }
}

impl MetricSpec {
    pub fn new(phi: Phi, weight: Weight, norm: Norm) -> Result<Self> {
        let s = MetricSpec { phi, weight, norm };
        s.validate()?;
        Ok(s)
    }

    /// φ = identity, weight 1, sup norm.
    pub fn sup() -> Self {
        MetricSpec {
            phi: Phi::Identity,
            weight: Weight::ConstOne,
            norm: Norm::Sup,
        }
    }

    pub fn l1() -> Self {
        MetricSpec {
            norm: Norm::L1,
            ..MetricSpec::sup()
        }
    }

    pub fn arctan_sup() -> Self {
        MetricSpec {
            norm: Norm::ArctanSup,
            ..MetricSpec::sup()
        }
    }

    pub fn with_norm(mut self, norm: Norm) -> Self {
        self.norm = norm;
        self
    }

    pub fn with_weight(mut self, weight: Weight) -> Self {
        self.weight = weight;
        self
    }

    pub fn with_phi(mut self, phi: Phi) -> Self {
        self.phi = phi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Phi::Power(p) = self.phi {
            if !(p.is_finite() && p >= 1.0) {
                return Err(Error::Config(format!("phi power must be >= 1, got {p}")));
            }
        }
        Ok(())
    }

    pub fn is_plain_sup(&self) -> bool {
        matches!(
            (&self.phi, &self.weight, &self.norm),
            (Phi::Identity, Weight::ConstOne, Norm::Sup)
        )
    }

    /// Weight at `t` inside window `w`; must be strictly positive.
    pub fn weight_at(&self, w: &CompactWindow, window_const: f64, t: &[f64]) -> Result<f64> {
        let v = match &self.weight {
            Weight::ConstOne => 1.0,
            Weight::ConstPerWindow(_) => window_const,
            Weight::Tabulated(f) => f(t),
        };
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::Config(format!(
                "weight must be positive and finite on the window {:?}, got {v} at {t:?}",
                w.bounds().collect::<Vec<_>>()
            )));
        }
        Ok(v)
    }

    pub fn window_constant(&self, w: &CompactWindow) -> f64 {
        match &self.weight {
            Weight::ConstPerWindow(rule) => rule.value(w),
            _ => 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn power_below_one_rejected() {
        assert!(MetricSpec::new(Phi::Power(0.5), Weight::ConstOne, Norm::Sup).is_err());
        assert!(MetricSpec::new(Phi::Power(2.0), Weight::ConstOne, Norm::Sup).is_ok());
    }

    #[test]
    fn half_width_rule() {
        let w = CompactWindow::interval(-4.0, 4.0, 0.1).unwrap();
        let r = WindowRule::HalfWidthPower { exponent: -2.5 };
        assert!((r.value(&w) - 4f64.powf(-2.5)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn phi_monotone_and_zero_at_zero(x in 0.0f64..100.0, dx in 0.0f64..10.0, p in 1.0f64..4.0) {
            for phi in [Phi::Identity, Phi::Power(p), Phi::Arctan] {
                prop_assert_eq!(phi.apply(0.0), 0.0);
                prop_assert!(phi.apply(x + dx) >= phi.apply(x));
            }
        }
    }
}
