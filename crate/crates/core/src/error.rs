//! Error type shared by all numerical operations in this crate.

use thiserror::Error;

/// Errors produced by state construction and metrology computations.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// All amplitudes are zero; the state cannot be normalized.
    #[error("spectrum has zero norm and cannot be normalized")]
    ZeroSpectrum,

    /// An operation that requires a normalized state received one whose
    /// quadrature norm deviates beyond tolerance.
    #[error("state is not normalized (quadrature norm {norm}, expected 1)")]
    NotNormalized { norm: f64 },

    /// A builder was asked to place a state on a grid that does not cover
    /// the required number of standard deviations around the mean.
    #[error("grid [{min}, {max}] too narrow: needs [{needed_min}, {needed_max}] (5 standard deviations of support)")]
    GridTooNarrow {
        min: f64,
        max: f64,
        needed_min: f64,
        needed_max: f64,
    },

    /// Photon count outside the supported range for the requested builder.
    #[error("invalid photon count {0}")]
    InvalidN(usize),

    /// A covariance matrix has an eigenvalue below the clamping threshold.
    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    /// Operation only defined for a specific photon count.
    #[error("operation unsupported for n = {0} photons")]
    UnsupportedN(usize),

    /// Vector or matrix dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Mode statistics contain a negative mean or variance.
    #[error("mode statistics must be nonnegative ({what} = {value})")]
    NegativeStatistics { what: &'static str, value: f64 },

    /// The finite-difference step for the overlap method is too large for
    /// the state's collective bandwidth.
    #[error("overlap step too large: dtheta * collective RMS = {product}, must be < 0.1")]
    StepTooLarge { product: f64 },

    /// A probability density contains NaN or infinite entries.
    #[error("probability density contains non-finite values")]
    NonFiniteDensity,

    /// Fisher information must be strictly positive to invert into a bound.
    #[error("Fisher information must be positive (got {0})")]
    NonPositiveFisher(f64),

    /// Correlation parameter outside [0, 1].
    #[error("eta must lie in [0, 1] (got {0})")]
    InvalidEta(f64),

    /// Too few points for a fit.
    #[error("need at least 3 points for a log-log fit (got {0})")]
    InsufficientPoints(usize),

    /// Log-log fits require strictly positive coordinates.
    #[error("log-log fit requires strictly positive points")]
    NonPositiveValue,

    /// The rotated amplitude does not factor into a product of collective
    /// modes within tolerance.
    #[error("state not factorizable in rotated coordinates (leading Schmidt weight {lambda1_sq} < 0.999); reduce the transverse width sigma")]
    NotFactorizable { lambda1_sq: f64 },

    /// The requested time grid undersamples the Wigner kernel.
    #[error("time step {step} violates the Nyquist bound {max_step} for this frequency grid")]
    NyquistViolation { step: f64, max_step: f64 },

    /// Malformed grid specification.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Catch-all for violated preconditions with no dedicated variant.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two redundant computation routes disagreed beyond tolerance.
    #[error("cross-check failed in {context}: relative error {relative_error}")]
    CrossCheckFailed {
        context: &'static str,
        relative_error: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
