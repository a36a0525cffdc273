use thiserror::Error;

/// Errors surfaced by the numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum SdtError {
    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("integration failure: error estimate {error_estimate:e} above tolerance {tolerance:e}")]
    IntegrationFailure { error_estimate: f64, tolerance: f64 },

    /// A matrix that must be invertible has a (near-)zero eigenvalue.
    #[error("singular matrix: eigenvalue {eigenvalue:e} below tolerance")]
    SingularMatrix { eigenvalue: f64 },

    /// A covariance matrix fed to the mixture builder is not positive definite.
    #[error("matrix not positive definite: smallest eigenvalue {eigenvalue:e}")]
    NotPositiveDefinite { eigenvalue: f64 },

    /// The chi-square series did not reach the requested truncation error.
    #[error("series not converged: truncation bound {achieved:e} after {terms} terms (requested {requested:e})")]
    SeriesNotConverged {
        achieved: f64,
        requested: f64,
        terms: usize,
    },

    /// The optimizer failed to locate a minimum of the estimation objective.
    #[error("estimation failure: {0}")]
    EstimationFailure(String),

    /// The alternative used in a power computation has zero asymptotic variance.
    #[error("degenerate alternative: sigma_{{beta,gamma,lambda}} is zero at theta*")]
    DegenerateAlternative,

    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A density input produced a materially negative divergence value.
    #[error("invalid density input: divergence {value:e} below -10*tol")]
    InvalidDensity { value: f64 },
}

pub type Result<T> = std::result::Result<T, SdtError>;
