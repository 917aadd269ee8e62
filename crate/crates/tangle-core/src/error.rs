use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series constant term is {found}, expected 1")]
    NonUnitConstantTerm { found: String },

    #[error("coefficient of g^{order} is not divisible by n: {coeff}")]
    NotDivisibleByN { order: usize, coeff: String },

    #[error("count table supports order {available}, {requested} requested")]
    InsufficientTableOrder { requested: usize, available: usize },

    #[error("table skips tangency cells (cost {cost}) but the tangency coupling starts at order {valuation}")]
    TangencyCost { cost: usize, valuation: usize },

    #[error("unsupported number of external legs: {0} (expected 2, 4 or 6)")]
    UnsupportedLegCount(usize),

    #[error("oracle search exceeded its budget of {limit} nodes")]
    BudgetExceeded { limit: u64 },

    #[error("enumeration aborted (last completed order: {last_completed:?}): {reason}")]
    Aborted {
        last_completed: Option<usize>,
        reason: String,
    },

    #[error("calibration error: {0}")]
    Calibration(String),

    #[error("pattern {0} has nonzero counts but no tangle type")]
    UnmappedPattern(String),

    #[error("patterns of tangle type {kind} disagree: {first} vs {second}")]
    ClassMismatch {
        kind: String,
        first: String,
        second: String,
    },

    #[error("nonzero residual in renormalization condition {0}")]
    Residual(String),

    #[error("fit window {0} is degenerate")]
    DegenerateWindow(String),

    #[error("sequence entry at p={0} is not positive")]
    NonPositiveEntry(usize),

    #[error("argument {0} outside the admissible range")]
    OutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("cache format version {found} does not match {expected}")]
    CacheVersion { found: u32, expected: u32 },

    #[error("cache entry does not match the requested parameters")]
    CacheMismatch,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
