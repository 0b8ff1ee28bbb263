use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("fractions {left} and {right} are not a unimodular (Farey-adjacent) pair")]
    NotAdjacent { left: String, right: String },
    #[error("Farey level must be at least 1, got {0}")]
    ZeroLevel(usize),
    #[error("value outside the unit interval: {0}")]
    OutOfRange(String),
    #[error("bracket [{lo}, {hi}] straddles the level-{level} boundary {boundary}")]
    Straddles {
        lo: String,
        hi: String,
        level: usize,
        boundary: String,
    },
    #[error("need {needed} partial quotients, only {available} available")]
    NotEnoughDigits { needed: usize, available: usize },
    #[error("partial quotients must be >= 1 (index {0})")]
    ZeroDigit(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("staircase with a = {0} is not summable (requires a > 1)")]
    Divergent(f64),
    #[error("period {period} exceeds configured max_period {max}")]
    PeriodTooLarge { period: u64, max: u64 },
    #[error("locking interval solver did not converge for: {}", .0.join(", "))]
    NotConverged(Vec<String>),
    #[error("missing step widths for: {}", .0.join(", "))]
    MissingWidths(Vec<String>),
    #[error("cache error: {0}")]
    Cache(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
