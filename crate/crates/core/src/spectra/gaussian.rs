//! Analytic n-photon Gaussian spectral states and the builders for every
//! state family in the toolkit.
//!
//! A [`GaussianState`] is fully specified by its mean frequency vector and
//! its n×n frequency covariance. Collective-variance computations reduce
//! to quadratic forms in the covariance, so they are exact for any photon
//! count. The correlated families produced by [`build_heisenberg_family`]
//! have a compound-symmetric covariance (common diagonal, common
//! off-diagonal); that structure is kept explicit so quadratic forms stay
//! O(n) and exact even for very large n.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::spectra::jsa::Jsa2D;
use crate::spectra::spectrum::{require_coverage, SpectralMoments, Spectrum1D};

/// Eigenvalues of a covariance in [−PSD_CLAMP, 0) are treated as 0;
/// anything lower is rejected.
const PSD_CLAMP: f64 = 1e-12;

/// Symmetry tolerance for user-supplied covariance matrices.
const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Signs α_i = ±1 selecting the collective frequency Σ α_i ω̂_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidArgument("sign vector must be non-empty".into()));
        }
        if let Some(bad) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidArgument(format!(
                "sign entries must be +1 or -1 (got {bad})"
            )));
        }
        Ok(Self(signs))
    }

    pub fn all_plus(n: usize) -> Self {
        Self(vec![1; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.0
    }

    /// Entry as a float factor.
    pub fn factor(&self, i: usize) -> f64 {
        f64::from(self.0[i])
    }

    /// Σ α_i.
    pub fn sum(&self) -> f64 {
        self.0.iter().map(|s| f64::from(*s)).sum()
    }

    pub(crate) fn ensure_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Photon-number and frequency statistics of one spatial mode, the inputs
/// of the mode-separable variance formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeStatistics {
    pub mean_n: f64,
    pub var_n: f64,
    pub mean_omega: f64,
    pub var_omega: f64,
}

impl ModeStatistics {
    pub fn new(mean_n: f64, var_n: f64, mean_omega: f64, var_omega: f64) -> Result<Self> {
        for (what, value) in [("mean_n", mean_n), ("var_n", var_n), ("var_omega", var_omega)] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::NegativeStatistics { what, value });
            }
        }
        if !mean_omega.is_finite() {
            return Err(Error::NegativeStatistics {
                what: "mean_omega",
                value: mean_omega,
            });
        }
        Ok(Self {
            mean_n,
            var_n,
            mean_omega,
            var_omega,
        })
    }

    /// One photon with certainty: ⟨n̂⟩ = 1, (Δn̂)² = 0.
    pub fn single_photon(moments: SpectralMoments) -> Self {
        Self {
            mean_n: 1.0,
            var_n: 0.0,
            mean_omega: moments.mean,
            var_omega: moments.variance,
        }
    }

    /// Coherent occupation: ⟨n̂⟩ = (Δn̂)² = |β|².
    pub fn coherent(beta: Complex64, moments: SpectralMoments) -> Self {
        let intensity = beta.norm_sqr();
        Self {
            mean_n: intensity,
            var_n: intensity,
            mean_omega: moments.mean,
            var_omega: moments.variance,
        }
    }
}

/// Frequency covariance of an n-photon Gaussian state.
///
/// The compound-symmetric variant stores the two distinct entries of a
/// matrix with constant diagonal and constant off-diagonal, which is the
/// exact structure of the correlated families built here; quadratic forms
/// on it are evaluated in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    Dense(DMatrix<f64>),
    CompoundSymmetric { n: usize, diag: f64, off: f64 },
}

impl Covariance {
    pub fn n(&self) -> usize {
        match self {
            Covariance::Dense(m) => m.nrows(),
            Covariance::CompoundSymmetric { n, .. } => *n,
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            Covariance::Dense(m) => m[(i, j)],
            Covariance::CompoundSymmetric { diag, off, .. } => {
                if i == j {
                    *diag
                } else {
                    *off
                }
            }
        }
    }

    pub fn diag_entry(&self, i: usize) -> f64 {
        self.entry(i, i)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        match self {
            Covariance::Dense(m) => m.clone(),
            Covariance::CompoundSymmetric { n, diag, off } => {
                DMatrix::from_fn(*n, *n, |i, j| if i == j { *diag } else { *off })
            }
        }
    }

    /// αᵀ Σ α with a fixed summation order.
    pub fn quadratic_form(&self, alphas: &SignVector) -> Result<f64> {
        alphas.ensure_len(self.n())?;
        Ok(match self {
            Covariance::Dense(m) => {
                let n = self.n();
                let mut acc = 0.0;
                for i in 0..n {
                    let ai = alphas.factor(i);
                    for j in 0..n {
                        acc += ai * alphas.factor(j) * m[(i, j)];
                    }
                }
                acc
            }
            Covariance::CompoundSymmetric { n, diag, off } => {
                let nf = *n as f64;
                let s = alphas.sum();
                nf * diag + (s * s - nf) * off
            }
        })
    }

    /// Smallest eigenvalue (closed form for the compound-symmetric case).
    pub fn min_eigenvalue(&self) -> f64 {
        match self {
            Covariance::Dense(m) => {
                let eig = m.clone().symmetric_eigen();
                eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
            }
            Covariance::CompoundSymmetric { n, diag, off } => {
                let collective = diag + (*n as f64 - 1.0) * off;
                let transverse = diag - off;
                if *n == 1 {
                    *diag
                } else {
                    collective.min(transverse)
                }
            }
        }
    }
}

/// Analytic n-photon spectral state: one photon per ancillary mode, mean
/// frequencies `mean` and frequency covariance `cov`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vec<f64>,
    cov: Covariance,
}

impl GaussianState {
    /// Construct from an explicit covariance matrix. The matrix must be
    /// symmetric within 1e-12 (relative to its largest entry) and positive
    /// semidefinite; eigenvalues in [−1e-12, 0) are clamped to zero.
    pub fn from_dense(mean: Vec<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if n == 0 {
            return Err(Error::InvalidN(0));
        }
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: cov.nrows().max(cov.ncols()),
            });
        }
        let scale = cov.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (cov[(i, j)] - cov[(j, i)]).abs() > SYMMETRY_TOLERANCE * scale {
                    return Err(Error::InvalidArgument(format!(
                        "covariance not symmetric at ({i}, {j}): {} vs {}",
                        cov[(i, j)],
                        cov[(j, i)]
                    )));
                }
            }
        }
        let sym = (&cov + cov.transpose()) * 0.5;
        let eig = sym.clone().symmetric_eigen();
        let min_eig = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_CLAMP * scale {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        let cov = if min_eig < 0.0 {
            // Rebuild with the offending eigenvalues clamped to zero.
            let mut vals = eig.eigenvalues.clone();
            for v in vals.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            let q = eig.eigenvectors;
            &q * DMatrix::from_diagonal(&vals) * q.transpose()
        } else {
            sym
        };
        Ok(Self {
            mean,
            cov: Covariance::Dense(cov),
        })
    }

    pub(crate) fn from_parts(mean: Vec<f64>, cov: Covariance) -> Self {
        Self { mean, cov }
    }

    pub fn n(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &Covariance {
        &self.cov
    }

    /// (Δω_i)², the i-th diagonal covariance entry.
    pub fn per_photon_variance(&self, i: usize) -> f64 {
        self.cov.diag_entry(i)
    }
}

/// n independent photons with common frequency RMS `delta_omega` and the
/// given mean frequencies. Covariance is diagonal.
pub fn build_separable(n: usize, delta_omega: f64, means: &[f64]) -> Result<GaussianState> {
    if n < 1 {
        return Err(Error::InvalidN(n));
    }
    if delta_omega <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta_omega must be positive (got {delta_omega})"
        )));
    }
    if means.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: means.len(),
        });
    }
    Ok(GaussianState::from_parts(
        means.to_vec(),
        Covariance::CompoundSymmetric {
            n,
            diag: delta_omega * delta_omega,
            off: 0.0,
        },
    ))
}

/// n-photon state with spectral weight concentrated along the collective
/// diagonal: per-photon RMS `delta_omega`, transverse collective width
/// `sigma`, mean frequencies `offsets`.
///
/// Every diagonal covariance entry is Δω²; the normalized all-equal
/// direction carries variance n·Δω² − (n−1)·σ²; the n−1 orthogonal
/// collective directions each carry σ². At σ = Δω the state degenerates to
/// the separable family; σ = 0 is the ideal fully correlated limit.
pub fn build_heisenberg_family(
    n: usize,
    delta_omega: f64,
    sigma: f64,
    offsets: &[f64],
) -> Result<GaussianState> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    if delta_omega <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta_omega must be positive (got {delta_omega})"
        )));
    }
    if !(sigma >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "sigma must be nonnegative (got {sigma})"
        )));
    }
    if offsets.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: offsets.len(),
        });
    }
    let dw2 = delta_omega * delta_omega;
    let s2 = sigma * sigma;
    let collective_eig = n as f64 * dw2 - (n as f64 - 1.0) * s2;
    if collective_eig < -PSD_CLAMP * dw2.max(1.0) {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: collective_eig,
        });
    }
    let off = if collective_eig < 0.0 {
        // Clamp the collective eigenvalue to exactly zero.
        -dw2 / (n as f64 - 1.0)
    } else {
        dw2 - s2
    };
    Ok(GaussianState::from_parts(
        offsets.to_vec(),
        Covariance::CompoundSymmetric { n, diag: dw2, off },
    ))
}

/// Correlated Gaussian photon pair on grids: per-photon RMS `delta_omega`,
/// frequency correlation `rho`, means `mean1`/`mean2`. The amplitude is the
/// real positive square root of the bivariate normal density.
pub fn build_gaussian_pair(
    mean1: f64,
    mean2: f64,
    delta_omega: f64,
    rho: f64,
    grid1: UniformGrid,
    grid2: UniformGrid,
) -> Result<Jsa2D> {
    if delta_omega <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta_omega must be positive (got {delta_omega})"
        )));
    }
    if !(rho.abs() < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "correlation must satisfy |rho| < 1 (got {rho})"
        )));
    }
    require_coverage(&grid1, mean1, delta_omega)?;
    require_coverage(&grid2, mean2, delta_omega)?;

    let dw2 = delta_omega * delta_omega;
    let one_minus_r2 = 1.0 - rho * rho;
    let amplitudes = DMatrix::from_fn(grid1.len(), grid2.len(), |i, j| {
        let u = grid1.point(i) - mean1;
        let v = grid2.point(j) - mean2;
        let q = (u * u - 2.0 * rho * u * v + v * v) / (one_minus_r2 * dw2);
        Complex64::new((-q / 4.0).exp(), 0.0)
    });
    Jsa2D::new(grid1, grid2, amplitudes)?.normalize()
}

/// Bridge an analytic two-photon Gaussian state onto grids. The amplitude
/// is the real positive square root of the bivariate normal density with
/// the state's mean and covariance, so grid moments reproduce the analytic
/// ones up to quadrature error.
pub fn gaussian_to_jsa(g: &GaussianState, grid1: UniformGrid, grid2: UniformGrid) -> Result<Jsa2D> {
    if g.n() != 2 {
        return Err(Error::UnsupportedN(g.n()));
    }
    let s11 = g.cov().entry(0, 0);
    let s22 = g.cov().entry(1, 1);
    let s12 = g.cov().entry(0, 1);
    let det = s11 * s22 - s12 * s12;
    let min_eig = 0.5 * (s11 + s22 - ((s11 - s22).powi(2) + 4.0 * s12 * s12).sqrt());
    if det <= 0.0 || min_eig <= 0.0 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min_eig,
        });
    }
    require_coverage(&grid1, g.mean()[0], s11.sqrt())?;
    require_coverage(&grid2, g.mean()[1], s22.sqrt())?;

    let amplitudes = DMatrix::from_fn(grid1.len(), grid2.len(), |i, j| {
        let d1 = grid1.point(i) - g.mean()[0];
        let d2 = grid2.point(j) - g.mean()[1];
        let q = (s22 * d1 * d1 - 2.0 * s12 * d1 * d2 + s11 * d2 * d2) / det;
        Complex64::new((-q / 4.0).exp(), 0.0)
    });
    Jsa2D::new(grid1, grid2, amplitudes)?.normalize()
}

/// Bridge an analytic single-photon Gaussian state onto a grid.
pub fn gaussian_to_spectrum(g: &GaussianState, grid: UniformGrid) -> Result<Spectrum1D> {
    if g.n() != 1 {
        return Err(Error::UnsupportedN(g.n()));
    }
    Spectrum1D::gaussian(grid, g.mean()[0], g.per_photon_variance(0).sqrt())
}

/// Default grid rule for bridging analytic states: `len` points covering
/// mean ± 6 standard deviations.
pub fn default_grid(mean: f64, std: f64, len: usize) -> Result<UniformGrid> {
    UniformGrid::centered(mean, 6.0 * std, len)
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Every grid builder emits a state with quadrature norm 1 ± 1e-6.
        #[test]
        fn pair_builder_preserves_normalization(
            rho in -0.95f64..0.95,
            dw in 0.5f64..2.0,
            mean in -1.0f64..1.0,
        ) {
            let half = 6.0 * dw + mean.abs();
            let gr = UniformGrid::new(-half, half, 201).unwrap();
            let j = build_gaussian_pair(mean, -mean, dw, rho, gr, gr).unwrap();
            prop_assert!((j.quadrature_norm() - 1.0).abs() < 1e-6);
        }

        /// Exchange-symmetric inputs produce exchange-symmetric amplitudes.
        #[test]
        fn symmetric_inputs_give_symmetric_jsa(
            rho in -0.9f64..0.9,
            dw in 0.5f64..1.5,
            mean in -0.5f64..0.5,
        ) {
            let half = 6.0 * dw + mean.abs();
            let gr = UniformGrid::new(mean - half, mean + half, 129).unwrap();
            let j = build_gaussian_pair(mean, mean, dw, rho, gr, gr).unwrap();
            prop_assert!(j.is_exchange_symmetric(1e-12));
        }

        /// Per-photon variances sit on the covariance diagonal for the
        /// analytic families.
        #[test]
        fn per_photon_variance_is_diagonal(
            n in 2usize..12,
            dw in 0.5f64..2.0,
            frac in 0.0f64..1.0,
        ) {
            let sigma = frac * dw;
            let h = build_heisenberg_family(n, dw, sigma, &vec![0.0; n]).unwrap();
            for i in 0..n {
                prop_assert!((h.per_photon_variance(i) - dw * dw).abs() < 1e-12);
            }
        }
    }
}
