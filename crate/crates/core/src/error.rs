//! Error taxonomy shared across the library.

use thiserror::Error;

/// Unified error type for model operations.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    /// The log-space potential has no pair of real extrema, so no barrier
    /// (and no escape problem) exists. Carries the discriminant
    /// `kappa^2 + 4 g theta_bar` for diagnostics.
    #[error("no barrier: discriminant {discriminant:.6e} (need kappa < 0, theta_bar < 0, discriminant >= 0)")]
    NoBarrier { discriminant: f64 },

    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Deterministic solution blows up before or at the requested time.
    #[error("solution is singular at t = {t_blowup:.6} (requested t = {t:.6})")]
    Singularity { t_blowup: f64, t: f64 },

    /// A numeric routine failed to converge or lost too much precision.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Monte Carlo estimation saw no absorption events within the time budget.
    #[error("inconclusive: no absorption within t_max = {t_max:.3} years")]
    Inconclusive { t_max: f64 },

    /// Invalid run configuration (step sizes, path counts, grids).
    #[error("config error: {0}")]
    Config(String),

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),
}

/// Library-wide result alias.
pub type Result<T> = std::result::Result<T, ModelError>;

impl ModelError {
    /// Convenience constructor for domain errors.
    pub fn domain(msg: impl Into<String>) -> Self {
        ModelError::Domain(msg.into())
    }

    /// Convenience constructor for numeric errors.
    pub fn numeric(msg: impl Into<String>) -> Self {
        ModelError::Numeric(msg.into())
    }
}
