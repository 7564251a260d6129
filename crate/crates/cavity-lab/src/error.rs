//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A wavefunction (or shear displacement) requires more grid support
    /// than the current axes provide.
    #[error("grid support violated: {reason} (required extent >= {required_extent})")]
    GridSupport { reason: String, required_extent: f64 },

    /// An iterative eigensolver failed to reach its residual target.
    #[error("eigensolver did not converge after {iterations} iterations; best residuals {best_residuals:?}")]
    NonConvergence {
        iterations: usize,
        best_residuals: Vec<f64>,
    },

    /// A requested quantity is undefined for the supplied state
    /// (e.g. no sub-barrier doublet in a tunneling-splitting request).
    #[error("{0}")]
    Unresolvable(String),

    /// Run-configuration schema violation.
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidInput(_) => 2,
            Error::NonConvergence { .. } | Error::Unresolvable(_) => 3,
            Error::GridSupport { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}
