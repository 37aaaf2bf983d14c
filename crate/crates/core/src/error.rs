use thiserror::Error;

/// Errors raised by the sensing pipeline and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("base station index {index} out of range for {count} stations")]
    StationIndex { index: usize, count: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: String, found: String },

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    /// Two range circles do not meet; the caller may fall back to the
    /// closest-approach point on the station baseline.
    #[error("range circles do not intersect")]
    NoIntersection,

    #[error("ill-conditioned fix: {0}")]
    IllConditioned(String),

    #[error("malformed report record: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
