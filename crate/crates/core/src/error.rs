use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("projection index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("height function h_{index} returned a non-finite value at {at:?}")]
    HeightEvaluation { index: usize, at: Vec<f64> },

    #[error("missing coefficient c[{index}, {multi_index:?}]")]
    MissingCoefficient {
        index: usize,
        multi_index: (u8, u8),
    },

    #[error("degenerate bounds on axis {axis}: [{lo}, {hi}]")]
    DegenerateBounds { axis: usize, lo: f64, hi: f64 },

    #[error("support exceeds the offset range")]
    SupportExceedsOffsets,

    #[error("zero norm: {0}")]
    ZeroNorm(String),

    #[error("discretization failure: {0}")]
    Discretization(String),

    #[error("output norm did not stabilize after {doublings} window doublings (last value {last})")]
    NotStabilized { doublings: usize, last: f64 },

    #[error("support margin violated: nonzero sample within {margin} cells of the grid edge")]
    MarginViolation { margin: usize },

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("search budget exhausted without a feasible evaluation")]
    BudgetExhausted,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
