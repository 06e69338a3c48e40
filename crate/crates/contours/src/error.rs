use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("vertex budget of {budget} exceeded while building a tree")]
    BudgetExceeded { budget: usize },

    #[error("truncation too shallow: open ends must lie at depth >= {required}, found one at depth {actual}")]
    TruncationTooShallow { required: usize, actual: usize },

    #[error("coefficients are not finite: one-child class cycle {0:?}")]
    InfiniteCoefficients(Vec<String>),

    #[error("infinitely many contours of size {n}")]
    InfiniteMultiplicity { n: usize },

    #[error("enumeration methods disagree at size {n}: {left} vs {right}")]
    Mismatch { n: usize, left: String, right: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grammar schema error: {0}")]
    Schema(String),

    #[error("insufficient data: need at least {needed} nonzero terms, found {found}")]
    InsufficientData { needed: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
