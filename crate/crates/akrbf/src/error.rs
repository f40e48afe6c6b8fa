use thiserror::Error;

/// Errors produced by kernel evaluation, training, center selection and
/// data handling.
#[derive(Debug, Error)]
pub enum Error {
    /// Two vectors (or a vector and a matrix row) disagree in dimension.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A parameter or input fails its validity constraints.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Both raw mixing weights are inside the zero guard, so the
    /// normalized weights are undefined.
    #[error("degenerate mixing state: both raw weights below {0:e} in magnitude")]
    DegenerateMixing(f64),

    /// A training update produced a non-finite quantity.
    #[error("training diverged: {0}")]
    Divergence(String),

    /// An operation that needs at least one element received none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A text input (CSV dataset or model snapshot) failed to parse.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// An underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
