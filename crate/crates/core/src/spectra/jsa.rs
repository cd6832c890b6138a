//! Joint spectral amplitudes of photon pairs.

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::quad;
use crate::spectra::spectrum::{Density1D, NORM_TOLERANCE};

/// Which photon of the pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    One,
    Two,
}

/// Complex two-photon amplitude J(ω₁, ω₂) on a pair of uniform frequency
/// grids. Row `i` runs over `grid1` (photon 1), column `j` over `grid2`
/// (photon 2). Normalized states satisfy ∫∫|J|² dω₁ dω₂ = 1 within 1e-9.
#[derive(Debug, Clone, PartialEq)]
pub struct Jsa2D {
    grid1: UniformGrid,
    grid2: UniformGrid,
    amplitudes: DMatrix<Complex64>,
}

impl Jsa2D {
    pub fn new(grid1: UniformGrid, grid2: UniformGrid, amplitudes: DMatrix<Complex64>) -> Result<Self> {
        if amplitudes.nrows() != grid1.len() {
            return Err(Error::DimensionMismatch {
                expected: grid1.len(),
                got: amplitudes.nrows(),
            });
        }
        if amplitudes.ncols() != grid2.len() {
            return Err(Error::DimensionMismatch {
                expected: grid2.len(),
                got: amplitudes.ncols(),
            });
        }
        Ok(Self {
            grid1,
            grid2,
            amplitudes,
        })
    }

    /// Product state S₁(ω₁)·S₂(ω₂) from two single-photon spectra.
    pub fn product(s1: &crate::spectra::Spectrum1D, s2: &crate::spectra::Spectrum1D) -> Result<Self> {
        let a1 = s1.amplitudes();
        let a2 = s2.amplitudes();
        let m = DMatrix::from_fn(a1.len(), a2.len(), |i, j| a1[i] * a2[j]);
        Self::new(*s1.grid(), *s2.grid(), m)?.normalize()
    }

    pub fn grid(&self, mode: Mode) -> &UniformGrid {
        match mode {
            Mode::One => &self.grid1,
            Mode::Two => &self.grid2,
        }
    }

    pub fn amplitudes(&self) -> &DMatrix<Complex64> {
        &self.amplitudes
    }

    pub fn with_amplitudes(&self, amplitudes: DMatrix<Complex64>) -> Result<Self> {
        Self::new(self.grid1, self.grid2, amplitudes)
    }

    /// Trapezoid quadrature of |J|² over both axes.
    pub fn quadrature_norm(&self) -> f64 {
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let mut acc = 0.0;
        for i in 0..n1 {
            let wi = quad::weight(i, n1);
            let mut row = 0.0;
            for j in 0..n2 {
                row += quad::weight(j, n2) * self.amplitudes[(i, j)].norm_sqr();
            }
            acc += wi * row;
        }
        acc * self.grid1.step() * self.grid2.step()
    }

    /// Rescale by a global positive factor so the quadrature norm is 1.
    pub fn normalize(&self) -> Result<Self> {
        let norm = self.quadrature_norm();
        if norm <= 0.0 {
            return Err(Error::ZeroSpectrum);
        }
        let scale = Complex64::new(1.0 / norm.sqrt(), 0.0);
        Ok(Self {
            grid1: self.grid1,
            grid2: self.grid2,
            amplitudes: self.amplitudes.map(|a| a * scale),
        })
    }

    pub(crate) fn ensure_normalized(&self) -> Result<()> {
        let norm = self.quadrature_norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized { norm });
        }
        Ok(())
    }

    /// |J|² marginalized over the other photon: the probability density of
    /// one photon's frequency.
    pub fn marginal(&self, mode: Mode) -> Result<Density1D> {
        self.ensure_normalized()?;
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let values = match mode {
            Mode::One => (0..n1)
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..n2 {
                        acc += quad::weight(j, n2) * self.amplitudes[(i, j)].norm_sqr();
                    }
                    acc * self.grid2.step()
                })
                .collect(),
            Mode::Two => (0..n2)
                .map(|j| {
                    let mut acc = 0.0;
                    for i in 0..n1 {
                        acc += quad::weight(i, n1) * self.amplitudes[(i, j)].norm_sqr();
                    }
                    acc * self.grid1.step()
                })
                .collect(),
        };
        Density1D::new(*self.grid(mode), values)
    }

    /// Mean frequency of each photon, by quadrature.
    pub fn mean_from_grid(&self) -> Result<Vector2<f64>> {
        self.ensure_normalized()?;
        let m1 = self.marginal(Mode::One)?.mean();
        let m2 = self.marginal(Mode::Two)?.mean();
        Ok(Vector2::new(m1, m2))
    }

    /// 2×2 frequency covariance of the pair, by quadrature. Symmetric by
    /// construction; the diagonal equals the marginal variances.
    pub fn covariance_from_grid(&self) -> Result<Matrix2<f64>> {
        self.ensure_normalized()?;
        let (n1, n2) = (self.grid1.len(), self.grid2.len());
        let (h1, h2) = (self.grid1.step(), self.grid2.step());

        let mut mean1 = 0.0;
        let mut mean2 = 0.0;
        for i in 0..n1 {
            let wi = quad::weight(i, n1);
            let w1 = self.grid1.point(i);
            for j in 0..n2 {
                let p = wi * quad::weight(j, n2) * self.amplitudes[(i, j)].norm_sqr();
                mean1 += p * w1;
                mean2 += p * self.grid2.point(j);
            }
        }
        mean1 *= h1 * h2;
        mean2 *= h1 * h2;

        let mut var1 = 0.0;
        let mut var2 = 0.0;
        let mut cross = 0.0;
        for i in 0..n1 {
            let wi = quad::weight(i, n1);
            let d1 = self.grid1.point(i) - mean1;
            for j in 0..n2 {
                let p = wi * quad::weight(j, n2) * self.amplitudes[(i, j)].norm_sqr();
                let d2 = self.grid2.point(j) - mean2;
                var1 += p * d1 * d1;
                var2 += p * d2 * d2;
                cross += p * d1 * d2;
            }
        }
        var1 *= h1 * h2;
        var2 *= h1 * h2;
        cross *= h1 * h2;

        Ok(Matrix2::new(var1, cross, cross, var2))
    }

    /// True when the amplitude matrix equals its transpose (requires equal
    /// grids on both axes).
    pub fn is_exchange_symmetric(&self, tol: f64) -> bool {
        if self.grid1 != self.grid2 {
            return false;
        }
        let n = self.grid1.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if (self.amplitudes[(i, j)] - self.amplitudes[(j, i)]).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{build_gaussian_pair, Spectrum1D};

    fn grid(min: f64, max: f64, len: usize) -> UniformGrid {
        UniformGrid::new(min, max, len).unwrap()
    }

    #[test]
    fn product_state_marginal_is_single_photon_density() {
        let g = grid(-7.0, 7.0, 181);
        let s1 = Spectrum1D::gaussian(g, 0.5, 1.0).unwrap();
        let s2 = Spectrum1D::gaussian(g, -0.25, 0.8).unwrap();
        let j = Jsa2D::product(&s1, &s2).unwrap();
        let m1 = j.marginal(Mode::One).unwrap();
        for (a, b) in m1.values().iter().zip(s1.density().values()) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!((m1.integrate() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn correlated_pair_marginal_variance_matches_model() {
        // Oracle: the per-photon variance of the underlying Gaussian model.
        let g = grid(-8.0, 8.0, 257);
        let j = build_gaussian_pair(0.0, 0.0, 1.2, 0.7, g, g).unwrap();
        let v = j.marginal(Mode::One).unwrap().variance();
        assert!((v - 1.44).abs() < 1e-3, "got {v}");
    }

    #[test]
    fn antidiagonal_state_has_identical_marginals() {
        let g = grid(-8.0, 8.0, 161);
        let j = build_gaussian_pair(0.0, 0.0, 1.0, -0.8, g, g).unwrap();
        let m1 = j.marginal(Mode::One).unwrap();
        let m2 = j.marginal(Mode::Two).unwrap();
        for (a, b) in m1.values().iter().zip(m2.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn marginal_rejects_unnormalized() {
        let g = grid(-6.0, 6.0, 65);
        let s = Spectrum1D::gaussian(g, 0.0, 1.0).unwrap();
        let j = Jsa2D::product(&s, &s).unwrap();
        let scaled = j.with_amplitudes(j.amplitudes() * Complex64::new(3.0, 0.0)).unwrap();
        assert!(matches!(
            scaled.marginal(Mode::One),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn product_state_has_zero_covariance() {
        let g = grid(-7.0, 7.0, 129);
        let s1 = Spectrum1D::gaussian(g, 1.0, 1.0).unwrap();
        let s2 = Spectrum1D::gaussian(g, -1.0, 1.0).unwrap();
        let j = Jsa2D::product(&s1, &s2).unwrap();
        let c = j.covariance_from_grid().unwrap();
        assert!(c[(0, 1)].abs() < 1e-9);
        assert!((c[(0, 1)] - c[(1, 0)]).abs() == 0.0);
    }

    #[test]
    fn correlated_pair_covariance_matches_model() {
        // Oracle: analytic bivariate Gaussian with ρ = 0.9, Δω = 1.
        let g = grid(-9.0, 9.0, 301);
        let j = build_gaussian_pair(0.0, 0.0, 1.0, 0.9, g, g).unwrap();
        let c = j.covariance_from_grid().unwrap();
        assert!((c[(0, 0)] - 1.0).abs() < 1e-3);
        assert!((c[(0, 1)] - 0.9).abs() < 1e-3);
        let m = j.marginal(Mode::One).unwrap().variance();
        assert!((c[(0, 0)] - m).abs() < 1e-6);
    }

    #[test]
    fn diagonal_ridge_is_nearly_perfectly_correlated() {
        // State concentrated on ω₁ = ω₂ with transverse width of one grid
        // step. Oracle: brute-force Riemann quadrature written out below,
        // independent of the covariance implementation.
        let g = grid(-6.0, 6.0, 241);
        let h = g.step();
        let sigma_t = h;
        let m = DMatrix::from_fn(241, 241, |i, j| {
            let w1 = g.point(i);
            let w2 = g.point(j);
            let along = (w1 + w2) / 2.0;
            let across = (w1 - w2) / std::f64::consts::SQRT_2;
            let a = (-along * along / 4.0 - across * across / (4.0 * sigma_t * sigma_t)).exp();
            Complex64::new(a, 0.0)
        });
        let j = Jsa2D::new(g, g, m).unwrap().normalize().unwrap();
        let c = j.covariance_from_grid().unwrap();
        let corr = c[(0, 1)] / (c[(0, 0)] * c[(1, 1)]).sqrt();
        assert!(corr >= 0.99, "corr = {corr}");

        let mut riemann_cross = 0.0;
        let mut riemann_norm = 0.0;
        for i in 0..241 {
            for jx in 0..241 {
                let p = j.amplitudes()[(i, jx)].norm_sqr() * h * h;
                riemann_cross += p * g.point(i) * g.point(jx);
                riemann_norm += p;
            }
        }
        let brute = riemann_cross / riemann_norm;
        assert!((brute - c[(0, 1)]).abs() < 1e-3);
    }
}
