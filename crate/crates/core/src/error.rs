use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("enumeration of the {m}x{n} grid refused: m+n = {} exceeds the limit {limit} (raise it explicitly to proceed)", m + n)]
    LimitExceeded { m: usize, n: usize, limit: usize },

    #[error("invalid path word {word:?}: {reason}")]
    InvalidWord { word: String, reason: String },

    #[error("invalid swap at gap {gap} of {word}: {reason}")]
    InvalidSwap { word: String, gap: usize, reason: String },

    #[error("malformed scrambler {text:?}: {reason}")]
    ScramblerSyntax { text: String, reason: String },

    #[error("scrambler {scrambler} is out of range for the {m}x{n} grid: {reason}")]
    ScramblerRange {
        scrambler: String,
        m: usize,
        n: usize,
        reason: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown identity {0:?}")]
    UnknownIdentity(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;
