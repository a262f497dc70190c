use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("point {point:?} lies outside the function domain")]
    Domain { point: Vec<f64> },
    #[error("window has empty intersection with the domain")]
    EmptyWindow,
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("shift {tau:?} does not map the domain into itself")]
    InvalidShift { tau: Vec<f64> },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no accepted almost periods in the report")]
    NoPeriods,
    #[error("ill-conditioned design matrix (condition {condition:.3e}); frequencies {pair:?} alias on the grid")]
    Conditioning { condition: f64, pair: (usize, usize) },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("supplied gradient disagrees with finite differences at {point:?} (fd {fd:?}, supplied {supplied:?})")]
    GradientConsistency {
        point: Vec<f64>,
        fd: Vec<f64>,
        supplied: Vec<f64>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
