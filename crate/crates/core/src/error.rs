use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed entry {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: count increases over the previous line")]
    NotSorted { line: usize },
    #[error("line {line}: negative count")]
    NegativeCount { line: usize },
    #[error("line {line}: input is not valid UTF-8")]
    InvalidUtf8 { line: usize },
    #[error("corpus or frequency list is empty")]
    EmptyCorpus,
    #[error("no frequency list for password length {0}")]
    UnknownLength(u32),
    #[error("per-rank length tags are unavailable for this corpus")]
    LengthTagsUnavailable,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("corpus is not consistent (already released or assembled from mismatched lists)")]
    InconsistentInput,
    #[error("payload of {payload} bytes is too small for the profile (minimum {minimum})")]
    PayloadTooSmall { payload: u64, minimum: u64 },
    #[error("payload of {payload} bytes does not map to a whole number of characters")]
    NonIntegralLength { payload: u64 },
    #[error("need at least two observations with distinct lengths")]
    InsufficientData,
    #[error("observations do not lie on a single line")]
    InconsistentObservations,
    #[error("observations imply a non-integral or negative profile")]
    NonIntegerProfile,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
