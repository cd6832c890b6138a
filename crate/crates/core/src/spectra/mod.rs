//! Spectral representations of single- and multi-photon states.
//!
//! Two pipelines coexist and are bridged where they overlap:
//!
//! * **Grid pipeline** — [`Spectrum1D`] and [`Jsa2D`] hold complex
//!   amplitudes sampled on uniform frequency grids. Moments come from
//!   trapezoid quadrature. Limited to one or two photons.
//! * **Analytic pipeline** — [`GaussianState`] holds exact first and
//!   second moments (mean vector and frequency covariance) of an
//!   n-photon Gaussian spectral model, for arbitrary n.
//!
//! Builders cover every state family used by the toolkit: independent
//! photons, correlated Gaussian pairs, and the maximally-correlated
//! family that concentrates spectral weight along the collective
//! diagonal ω₁ = ω₂ = … with transverse width σ.

mod gaussian;
mod jsa;
mod spectrum;

pub use gaussian::{
    build_gaussian_pair, build_heisenberg_family, build_separable, default_grid, gaussian_to_jsa,
    gaussian_to_spectrum, Covariance, GaussianState, ModeStatistics, SignVector,
};
pub use jsa::{Jsa2D, Mode};
pub use spectrum::{Density1D, SpectralMoments, Spectrum1D};
