//! # tfqm — time-frequency quantum metrology
//!
//! Precision limits for time-delay estimation with multi-photon spectral
//! states, treating frequency as a quantum continuous variable. The crate
//! builds the relevant state families (independent photons, correlated
//! Gaussian pairs, maximally frequency-correlated n-photon states with
//! finite transverse width, coherent references), computes the quantum
//! Fisher information of the collective time-delay generator by several
//! routes, exhibits the quadratic-to-linear transition of the precision
//! scaling with photon number, and renders the time-frequency phase-space
//! picture through chronocyclic Wigner functions.
//!
//! Modules map onto the pipeline:
//!
//! * [`spectra`] — grids, spectral amplitudes, analytic Gaussian states,
//!   and builders for every state family.
//! * [`metrology`] — collective variances, QFI (variance and overlap
//!   forms), classical Fisher information, Cramér–Rao bounds, scaling
//!   sweeps.
//! * [`phasespace`] — Wigner maps, time evolution, collective
//!   coordinates, Schmidt decomposition.
//! * [`statedef`] — the JSON state-definition format.
//! * [`output`] — deterministic CSV/PGM/JSON writers for the `tfqm` CLI.
//!
//! Units are dimensionless with ħ = 1; frequencies are angular.
//! Everything is immutable after construction and all operations are pure
//! functions, so values can be shared freely across threads.

// Precondition checks use `!(x > 0.0)` so NaN fails validation too;
// `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fourier;
pub mod grid;
pub mod linalg;
pub mod metrology;
pub mod output;
pub mod phasespace;
pub mod quad;
pub mod spectra;
pub mod statedef;

pub use error::{Error, Result};
pub use grid::UniformGrid;
