//! Uniform one-dimensional grids.
//!
//! A [`UniformGrid`] discretizes a closed interval into equally spaced
//! points. The same type serves as the frequency axis of spectral
//! amplitudes (variable ω) and as the time axis of Wigner maps and
//! arrival-time densities (variable τ); both are dimensionless here
//! (ħ = 1 convention, frequencies in angular units).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform discretization of `[min, max]` with `len` points.
///
/// Point `k` sits exactly at `min + k * step` with
/// `step = (max - min) / (len - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrid {
    min: f64,
    max: f64,
    len: usize,
}

impl UniformGrid {
    /// Build a grid over `[min, max]` with `len >= 2` points.
    pub fn new(min: f64, max: f64, len: usize) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "bounds must be finite (got [{min}, {max}])"
            )));
        }
        if max <= min {
            return Err(Error::InvalidGrid(format!(
                "max must exceed min (got [{min}, {max}])"
            )));
        }
        if len < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 points (got {len})"
            )));
        }
        Ok(Self { min, max, len })
    }

    /// Symmetric grid `[center - half_width, center + half_width]`.
    pub fn centered(center: f64, half_width: f64, len: usize) -> Result<Self> {
        Self::new(center - half_width, center + half_width, len)
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing between adjacent points.
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.len - 1) as f64
    }

    /// Full extent `max - min`.
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Coordinate of point `k`.
    pub fn point(&self, k: usize) -> f64 {
        debug_assert!(k < self.len);
        self.min + k as f64 * self.step()
    }

    /// Iterator over all grid coordinates.
    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |k| self.point(k))
    }

    /// True when `[lo, hi]` lies inside the grid.
    pub fn covers(&self, lo: f64, hi: f64) -> bool {
        self.min <= lo && hi <= self.max
    }

    /// Index of the grid point nearest to `x`.
    pub fn nearest_index(&self, x: f64) -> usize {
        let raw = ((x - self.min) / self.step()).round();
        (raw.max(0.0) as usize).min(self.len - 1)
    }
}
