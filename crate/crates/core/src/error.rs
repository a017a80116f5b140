use thiserror::Error;

/// Errors raised by lattice construction, operator assembly and evolution.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PftError {
    #[error("invalid extent: {0}")]
    InvalidExtent(String),
    #[error("degenerate coupling: J must be nonzero")]
    DegenerateCoupling,
    #[error("index out of range: {0}")]
    Index(String),
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("representation mismatch: {0}")]
    RepresentationMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("wrong statistics: {0}")]
    WrongStatistics(String),
    #[error("degenerate function: {0}")]
    DegenerateFunction(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl PftError {
    /// True for failures of the numerics themselves rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, PftError::Numerical(_))
    }
}

pub type Result<T> = std::result::Result<T, PftError>;
