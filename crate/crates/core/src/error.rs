use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("unknown sequence spec `{0}` (expected dyadic, factorial, geometric:b, tower:b or [q1,q2,...])")]
    Sequence(String),
    #[error("unknown term sequence `{0}` (expected c*b^n, b^n, n! or c*<sequence>)")]
    Terms(String),
    #[error("unknown ideal spec `{0}` (expected fin, density, summable or summable:s)")]
    Ideal(String),
    #[error("unknown weight rule `{0}` (expected 1, 1/n or 1/n^s)")]
    Weights(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid arithmetic sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid set descriptor: {0}")]
    InvalidSet(String),

    #[error("insufficient digits: expansion known through index {available}, need index {required}")]
    InsufficientDigits { available: u64, required: u64 },

    #[error("generator exhausted before cutoff {cutoff} (partial count {partial})")]
    Exhausted { cutoff: u64, partial: u64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported ideal: {0}")]
    UnsupportedIdeal(String),

    #[error("sequence is not absorbing: k_n stayed at most {max_k} on indices {from}..={to}")]
    NotAbsorbing { from: u64, to: u64, max_k: u64 },

    #[error("no admissible index in scan window {from}..={to} ({reason})")]
    WindowExhausted { from: u64, to: u64, reason: String },

    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
