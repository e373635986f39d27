use thiserror::Error;

/// Crate-wide error type. Variants name the violated precondition.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("mode index {mode} out of range for a {n_modes}-mode state")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("beam splitter transmittance must lie in [0, 1], got {0}")]
    InvalidTransmittance(f64),

    #[error("kept mode set must be non-empty, in range, and free of duplicates: {0}")]
    InvalidKeep(String),

    #[error("matrix is not symplectic (max deviation {0:.3e} from the form condition)")]
    NotSymplectic(f64),

    #[error("operation requires a single-mode state, got {0} modes")]
    NotSingleMode(usize),

    #[error("covariance block is not positive definite")]
    NotPositiveDefinite,

    #[error("measured quadrature variance {0:.3e} is below the conditioning guard (1e-14)")]
    DegenerateQuadrature(f64),

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("routes disagree: {0}")]
    RouteDisagreement(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for parameter/usage problems,
    /// 3 when independently computed routes disagree beyond tolerance.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::RouteDisagreement(_) => 3,
            _ => 2,
        }
    }
}
