use thiserror::Error;

/// Failure modes shared by every solver route.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integrator exceeded {max_steps} steps near t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },

    #[error("integrator step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },

    #[error("right-hand side produced a non-finite state at t = {t}")]
    NonFiniteState { t: f64 },

    #[error("integrand is not finite at {at}")]
    NonFiniteIntegrand { at: f64 },

    #[error("adaptive quadrature exceeded {max_intervals} subintervals")]
    QuadratureLimitExceeded { max_intervals: usize },

    #[error("transfer matrix determinant drifted by {drift:e} at alpha = {alpha}")]
    DeterminantDrift { alpha: f64, drift: f64 },

    #[error("matrix is not a transfer matrix: |det - 1| = {drift:e}")]
    InvalidTransferMatrix { drift: f64 },

    #[error("Riccati solution blew up (|R^r| = {magnitude:e}) at a = {a}")]
    BlowUp { a: f64, magnitude: f64 },

    #[error("spectral singularity at k = {k}: 1/T residual {residual:e}")]
    SpectralSingularityEncountered { k: f64, residual: f64 },

    #[error("transmission amplitude vanishes")]
    ZeroTransmission,

    #[error("closed form has a pole: {0}")]
    PoleEncountered(String),

    #[error("designed index profile is singular: {0}")]
    SingularProfile(String),
}

pub type Result<T> = std::result::Result<T, ScatterError>;
