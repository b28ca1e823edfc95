use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A strength value falls at or above the top threshold.
    #[error("value {value} is outside the quantizer range [0, {top}){}", coord_suffix(*coordinate))]
    OutOfRange {
        value: u64,
        top: u64,
        coordinate: Option<usize>,
    },

    #[error("bin index {bin} is not in [0, {bins})")]
    InvalidBin { bin: usize, bins: usize },

    #[error("invalid thresholds: {0}")]
    InvalidThresholds(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible thresholds: {0}")]
    InfeasibleThresholds(String),

    #[error("operation not supported for {0} sequences")]
    UnsupportedKind(&'static str),

    #[error("sequence violates its own invariant: {0}")]
    CorruptSequence(String),

    #[error("threshold headroom violated: {0}")]
    Headroom(String),

    #[error("parameter mismatch: {0}")]
    Parameter(String),

    #[error("base code claim is wrong: {0}")]
    InvalidBase(String),

    #[error("decoding failed: {0}")]
    DecodingFailure(String),

    #[error("enumeration budget exceeded: {needed} > {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    /// Two independent evaluation routes of the same property disagreed.
    #[error("internal route disagreement: {0}")]
    RouteDisagreement(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn coord_suffix(coordinate: Option<usize>) -> String {
    match coordinate {
        Some(k) => format!(" at coordinate {k}"),
        None => String::new(),
    }
}
