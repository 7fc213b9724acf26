use thiserror::Error;

/// Errors raised by the library. Report-style checks never return these;
/// they describe failures as report content instead.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("{what} cap exceeded: {value} > {cap} (raise it with CCSTAB_CAP_OVERRIDE)")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
    },
    #[error("line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid coloring: {0}")]
    InvalidColoring(String),
    #[error("not a coherent configuration: {0}")]
    NotCoherent(String),
    #[error("not a homogeneity set: {0}")]
    NotHomogeneitySet(String),
    #[error("arity error: {0}")]
    Arity(String),
    #[error("inconsistent seed: {0}")]
    InconsistentSeed(String),
    #[error("no standard similarity: {0}")]
    NoStandardSimilarity(String),
    #[error("invalid plane: {0}")]
    InvalidPlane(String),
    #[error("unsupported field order {0}")]
    UnsupportedOrder(usize),
    #[error("constancy violation: {0}")]
    Constancy(String),
    #[error("not a 2-extension: {0}")]
    NotTwoExtension(String),
    #[error("point {point} out of range for n = {n}")]
    PointOutOfRange { point: usize, n: usize },
    #[error("tuple length mismatch: {0} vs {1}")]
    TupleLength(usize, usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}
