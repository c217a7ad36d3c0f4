use thiserror::Error;

/// Failure modes shared by every numerical module.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    /// The true value exceeds the f64 range; `value` carries the signed infinity.
    #[error("gamma function overflows at x = {x}")]
    Overflow { x: f64, value: f64 },

    #[error("series did not reach tolerance after {terms} terms")]
    NonConvergence { terms: usize },

    #[error("Laplace integral tail did not close before t = {horizon}")]
    Divergence { horizon: f64 },

    #[error("contour inversion unstable at t = {t}: {coarse} vs {fine}")]
    ContourFailure { t: f64, coarse: f64, fine: f64 },

    #[error("solution residual {residual:e} exceeds threshold {threshold:e}")]
    Residual { residual: f64, threshold: f64 },

    #[error("closed-form oscillator solution requires mu = 0 (got {0})")]
    UnsupportedFriction(f64),
}

impl Error {
    /// True for failures of the numerics (as opposed to invalid input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Overflow { .. }
                | Error::NonConvergence { .. }
                | Error::Divergence { .. }
                | Error::ContourFailure { .. }
                | Error::Residual { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
