use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate face {face}")]
    Degenerate { face: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("linear solver failed: {0}")]
    Solver(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("registration failed for {} vertices (first: {:?})", .vertices.len(), .vertices.first())]
    Registration { vertices: Vec<usize> },
}

/// Coarse grouping used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Argument,
    Topology,
    Numerical,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Io(_) | Error::Format { .. } | Error::Argument(_) => ErrorClass::Argument,
            Error::Topology(_) => ErrorClass::Topology,
            Error::Degenerate { .. }
            | Error::Precondition(_)
            | Error::Solver(_)
            | Error::Geometry(_)
            | Error::Consistency(_)
            | Error::Registration { .. } => ErrorClass::Numerical,
        }
    }
}
