use thiserror::Error;

/// Crate-wide error type.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,

    #[error("polynomial must be monic: {0}")]
    NotMonic(String),

    #[error("polynomial is not irreducible: {0}")]
    NotIrreducible(String),

    #[error("enumeration budget exceeded: needs {needed} elements, budget is {budget} (override with --budget or HYPERZETA_BUDGET)")]
    BudgetExceeded { needed: u128, budget: u64 },

    /// A mathematical identity that is a theorem failed to hold. Always a bug.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("root finder failed to converge: {0}")]
    NonConvergence(String),

    #[error("MCMC convergence diagnostic failed: {0}")]
    Diagnostics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
