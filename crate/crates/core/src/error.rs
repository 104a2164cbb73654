use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("not a permutation: {0}")]
    NotABijection(String),
    #[error("sequence of length {len} is too short (need at least {min})")]
    TooShort { len: usize, min: usize },
    #[error("tie between positions {first} and {second}")]
    TieDetected { first: usize, second: usize },
    #[error("size {size} exceeds the limit of {limit} (override with ORDPAT_MAX_N)")]
    SizeTooLarge { size: usize, limit: usize },
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("ideal is missing simple root ({0},{1})")]
    MissingSimpleRoots(usize, usize),
    #[error("not a valid alcove address")]
    NotAnAddress,
    #[error("reference distribution is zero at pattern {0} where the other is positive")]
    UnsupportedReference(String),
    #[error("line {line}: cannot parse {token:?} as a finite number")]
    Ingest { line: usize, token: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
