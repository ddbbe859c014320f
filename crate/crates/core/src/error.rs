use thiserror::Error;

/// Crate-wide error type.
///
/// `LimitExceeded` is kept distinct from plain validation errors because the
/// CLI maps it to its own exit code (3): refusing an oversized exhaustive
/// search is not a malformed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: {context} (left {left}, right {right})")]
    LengthMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("{what} out of range: {detail}")]
    OutOfRange { what: &'static str, detail: String },

    #[error("exhaustive limit exceeded: {what} needs {needed}, limit {limit}")]
    LimitExceeded {
        what: &'static str,
        needed: u64,
        limit: u64,
    },

    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("invalid csp: {0}")]
    InvalidCsp(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("code backend is not linear: {0}")]
    NonLinearCode(String),

    #[error("unknown backend id: {0}")]
    UnknownBackend(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fast path structure invalid: {0}")]
    FastPath(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors that mean "the requested search is too large", as
    /// opposed to malformed input.
    pub fn is_limit(&self) -> bool {
        matches!(self, Error::LimitExceeded { .. })
    }
}
