use num_bigint::BigUint;
use thiserror::Error;

/// Errors surfaced by circle arithmetic, measures, systems, and experiments.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("numeric backends differ between operands; build all points of one experiment with the same backend")]
    BackendMismatch,

    #[error("fixed-point precision exhausted: multiplier needs {needed} bits but only {available} are budgeted")]
    PrecisionExhausted { needed: u64, available: u64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires an invertible system (rotation or Denjoy)")]
    NotInvertible,

    #[error("point is not in the support of the measure at resolution {resolution}")]
    NotInSupport { resolution: String },

    #[error("classification ambiguous at resolution {resolution}: one-sided mass {mass} is below the certification margin")]
    AmbiguousAtResolution { resolution: String, mass: String },

    #[error("bisection did not converge within {iterations} iterations")]
    BisectionBudget { iterations: u32 },

    #[error(
        "scan budget {budget} exhausted after finding {found} of {requested} recurrence times"
    )]
    ScanBudget {
        budget: u64,
        found: usize,
        requested: usize,
    },

    #[error("radius profile is not weakly decreasing at q = {at}")]
    ProfileNotDecreasing { at: u64 },

    #[error("polynomial support is invalid: {0}")]
    InvalidPolynomial(String),

    #[error("truncation tolerance unachievable: tail {tail} exceeds tol {tol} at N_max = {n_max}")]
    TolUnachievable {
        tail: String,
        tol: String,
        n_max: u32,
    },

    #[error("radius sequence variant not supported by this operation: {0}")]
    UnsupportedSequence(String),

    #[error("semigroup index component must be >= 1, got {0}")]
    IndexNotPositive(BigUint),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
