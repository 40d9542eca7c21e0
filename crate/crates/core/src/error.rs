use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A mode with zero phonon energy but non-zero phonon coupling.
    #[error("mode {index}: big_omega = 0 with omega = {omega} has no closed form")]
    DegenerateMode { index: usize, omega: f64 },

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("invalid ensemble spec: {0}")]
    SpecInvalid(String),

    #[error("Fock truncation too small: {0}")]
    TruncationTooSmall(String),

    #[error("tridiagonal eigensolver did not converge (dimension {dim}, eigenvalue {index})")]
    EigenFailure { dim: usize, index: usize },

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::ConfigInvalid(msg.into())
    }
}
