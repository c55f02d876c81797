use thiserror::Error;

/// Machine-readable error classes. The CLI maps these onto exit codes:
/// input problems exit 2, internal invariant failures exit 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("valence error: {0} (local system reduction not supported)")]
    Valence(String),

    #[error("degeneracy: {0}")]
    Degeneracy(String),

    #[error("filtered reduction left {0} survivors, expected exactly 1")]
    SurvivorCount(usize),

    #[error("no unique symmetric Alexander shift exists")]
    NoSymmetricShift,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("shape not recognized: {0}")]
    ShapeNotRecognized(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than internal bugs.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. }
                | Error::Invariant(_)
                | Error::Valence(_)
                | Error::Unsupported(_)
                | Error::Io(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
