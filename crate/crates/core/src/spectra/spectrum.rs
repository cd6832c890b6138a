//! Single-photon spectral amplitudes and real densities on uniform grids.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quad;

/// Norm deviation beyond which an operation refuses its input.
pub(crate) const NORM_TOLERANCE: f64 = 1e-6;

/// Complex spectral amplitude S(ω) of one photon, sampled on a uniform
/// frequency grid. Normalized states satisfy ∫|S|² dω = 1 (trapezoid
/// quadrature) within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    grid: UniformGrid,
    amplitudes: Vec<Complex64>,
}

/// First and second moments of a frequency (or time) distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralMoments {
    pub mean: f64,
    pub variance: f64,
    /// Second raw moment; equals `variance + mean²` by construction.
    pub mean_square: f64,
}

impl Spectrum1D {
    pub fn new(grid: UniformGrid, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: amplitudes.len(),
            });
        }
        Ok(Self { grid, amplitudes })
    }

    /// Normalized Gaussian amplitude centered at `mean` with frequency RMS
    /// `delta_omega` (the RMS of the density |S|², not of the amplitude).
    ///
    /// The grid must cover `mean ± 5·delta_omega`; narrower grids would
    /// truncate enough probability to bias moments above 1e-6.
    pub fn gaussian(grid: UniformGrid, mean: f64, delta_omega: f64) -> Result<Self> {
        if delta_omega <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "delta_omega must be positive (got {delta_omega})"
            )));
        }
        require_coverage(&grid, mean, delta_omega)?;
        let amplitudes = grid
            .points()
            .map(|w| {
                let z = (w - mean) / delta_omega;
                Complex64::new((-z * z / 4.0).exp(), 0.0)
            })
            .collect();
        Self::new(grid, amplitudes)?.normalize()
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Trapezoid quadrature of |S|².
    pub fn quadrature_norm(&self) -> f64 {
        let n = self.amplitudes.len();
        let mut acc = 0.0;
        for (k, a) in self.amplitudes.iter().enumerate() {
            acc += quad::weight(k, n) * a.norm_sqr();
        }
        acc * self.grid.step()
    }

    /// Rescale by a global positive factor so the quadrature norm is 1.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.quadrature_norm();
        if norm <= 0.0 {
            return Err(Error::ZeroSpectrum);
        }
        let scale = 1.0 / norm.sqrt();
        Ok(Self {
            grid: self.grid,
            amplitudes: self.amplitudes.iter().map(|a| a * scale).collect(),
        })
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        let norm = self.quadrature_norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// |S(ω)|² as a probability density.
    pub fn density(&self) -> Density1D {
        Density1D {
            grid: self.grid,
            values: self.amplitudes.iter().map(|a| a.norm_sqr()).collect(),
        }
    }

    /// Mean, variance and raw second moment of the density |S(ω)|².
    ///
    /// Requires a normalized input (norm within 1e-6 of 1). The variance is
    /// computed as the second *central* moment so point-mass spectra report
    /// exactly zero, and `mean_square = variance + mean²` holds identically.
    pub fn moments(&self) -> Result<SpectralMoments> {
        self.ensure_normalized()?;
        Ok(self.density().moments())
    }
}

/// Real nonnegative density sampled on a uniform grid (frequency marginals,
/// arrival-time distributions, measurement outcome densities).
#[derive(Debug, Clone, PartialEq)]
pub struct Density1D {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl Density1D {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteDensity);
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integrate(&self) -> f64 {
        quad::integrate(&self.values, self.grid.step())
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        let norm = self.integrate();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    pub fn moments(&self) -> SpectralMoments {
        let step = self.grid.step();
        let mean = quad::integrate_map(&self.values, step, |k, v| self.grid.point(k) * v);
        let variance = quad::integrate_map(&self.values, step, |k, v| {
            let d = self.grid.point(k) - mean;
            d * d * v
        });
        SpectralMoments {
            mean,
            variance,
            mean_square: variance + mean * mean,
        }
    }

    pub fn mean(&self) -> f64 {
        self.moments().mean
    }

    pub fn variance(&self) -> f64 {
        self.moments().variance
    }
}

pub(crate) fn require_coverage(grid: &UniformGrid, mean: f64, std: f64) -> Result<()> {
    let lo = mean - 5.0 * std;
    let hi = mean + 5.0 * std;
    if !grid.covers(lo, hi) {
        return Err(Error::GridTooNarrow {
            min: grid.min(),
            max: grid.max(),
            needed_min: lo,
            needed_max: hi,
        });
    }
    Ok(())
}
