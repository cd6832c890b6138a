//! Time-frequency phase space: chronocyclic Wigner functions, time-delay
//! evolution, collective coordinates and Schmidt analysis.
//!
//! # Conventions (fixed here, tested below)
//!
//! * Wigner kernel: W(φ, τ) = (1/π) ∫ dω e^{−2iωτ} S(φ+ω) S*(φ−ω).
//!   The 1/π prefactor makes ∫∫ W dφ dτ = 1 and both marginals exact:
//!   ∫W dτ = |S(φ)|² and ∫W dφ = |ψ(τ)|² with ψ the arrival-time
//!   amplitude (2π)^{-1/2} ∫ S e^{−iωτ} dω.
//! * Evolution: [`TimeEvolve::evolve`] multiplies amplitudes by
//!   e^{i Σ α_k ω_k δt}. With the kernel sign above, evolving by +δt
//!   translates the Wigner map to τ + δt and delays arrival densities by
//!   +δt. The kernel sign is the one free choice; everything else follows.
//! * Rotated coordinates are orthonormal: Ω± = (α₁ω₁ ± α₂ω₂)/√2. The sum
//!   variable Σ α_i ω_i equals √2·Ω₊, so shifts measured on the collective
//!   map convert to the sum-coordinate convention by a factor √n (n = 2).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierQuadrature;
use crate::grid::UniformGrid;
use crate::metrology::arrival_time_density;
use crate::quad;
use crate::spectra::{Density1D, Jsa2D, Mode, SignVector, Spectrum1D};

/// Ceiling on the imaginary residue of computed Wigner values; larger
/// residues indicate a broken symmetry in the construction.
const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-10;

/// Leading Schmidt weight above which a rotated amplitude is treated as a
/// product of collective modes.
const FACTORIZABLE_LAMBDA1_SQ: f64 = 0.999;

/// Real chronocyclic Wigner function sampled on a (frequency φ, time τ)
/// rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMap {
    phi_grid: UniformGrid,
    tau_grid: UniformGrid,
    /// Row i ↔ φ point, column j ↔ τ point.
    values: DMatrix<f64>,
}

impl WignerMap {
    pub fn phi_grid(&self) -> &UniformGrid {
        &self.phi_grid
    }

    pub fn tau_grid(&self) -> &UniformGrid {
        &self.tau_grid
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// ∫∫ W dφ dτ.
    pub fn integrate(&self) -> f64 {
        quad::integrate_2d(
            |i, j| self.values[(i, j)],
            self.phi_grid.len(),
            self.tau_grid.len(),
            self.phi_grid.step(),
            self.tau_grid.step(),
        )
    }

    /// ∫ W dτ as a density over φ (equals |S(φ)|² once the τ window
    /// covers the state's time support).
    pub fn frequency_marginal(&self) -> Density1D {
        let values: Vec<f64> = (0..self.phi_grid.len())
            .map(|i| {
                let row: Vec<f64> = (0..self.tau_grid.len()).map(|j| self.values[(i, j)]).collect();
                quad::integrate(&row, self.tau_grid.step())
            })
            .collect();
        Density1D::new(self.phi_grid, values).expect("finite by construction")
    }

    /// ∫ W dφ as a density over τ (the arrival-time density).
    pub fn time_marginal(&self) -> Density1D {
        let values: Vec<f64> = (0..self.tau_grid.len())
            .map(|j| {
                let col: Vec<f64> = (0..self.phi_grid.len()).map(|i| self.values[(i, j)]).collect();
                quad::integrate(&col, self.phi_grid.step())
            })
            .collect();
        Density1D::new(self.tau_grid, values).expect("finite by construction")
    }

    /// First moment of |W| along τ; sub-bin resolution follows from the
    /// smoothness of |W|.
    pub fn tau_centroid_abs(&self) -> f64 {
        let mut weight_sum = 0.0;
        let mut moment = 0.0;
        for i in 0..self.phi_grid.len() {
            let wi = quad::weight(i, self.phi_grid.len());
            for j in 0..self.tau_grid.len() {
                let w = wi * quad::weight(j, self.tau_grid.len()) * self.values[(i, j)].abs();
                weight_sum += w;
                moment += w * self.tau_grid.point(j);
            }
        }
        moment / weight_sum
    }
}

/// Largest admissible τ step for a frequency grid: π / (grid width).
pub fn nyquist_max_step(freq_grid: &UniformGrid) -> f64 {
    std::f64::consts::PI / freq_grid.width()
}

/// Uniform τ grid over ±`half_width` respecting the Nyquist bound of
/// `freq_grid`, with at least `min_len` points.
pub fn default_tau_grid(
    freq_grid: &UniformGrid,
    half_width: f64,
    min_len: usize,
) -> Result<UniformGrid> {
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "half_width must be positive (got {half_width})"
        )));
    }
    let max_step = nyquist_max_step(freq_grid);
    let needed = (2.0 * half_width / max_step).ceil() as usize + 1;
    UniformGrid::centered(0.0, half_width, needed.max(min_len).max(2))
}

/// Chronocyclic Wigner function of a single-photon spectrum, evaluated for
/// each φ on the spectral grid by a chirp-z transform over the symmetric
/// frequency offset.
pub fn wigner_single(s: &Spectrum1D, tau_grid: UniformGrid) -> Result<WignerMap> {
    s.ensure_normalized()?;
    let grid = *s.grid();
    let max_step = nyquist_max_step(&grid);
    if tau_grid.step() > max_step * (1.0 + 1e-12) {
        return Err(Error::NyquistViolation {
            step: tau_grid.step(),
            max_step,
        });
    }

    let n = grid.len();
    let h = grid.step();
    // Offset variable ω = c·h for c ∈ [−(n−1), n−1]; out-of-grid products
    // vanish because the state has no support there.
    let offset_grid = UniformGrid::new(-((n - 1) as f64) * h, (n - 1) as f64 * h, 2 * n - 1)?;
    let transform = FourierQuadrature::new(&offset_grid, &tau_grid, -2.0);
    let amps = s.amplitudes();

    let rows: Vec<(Vec<f64>, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut products = vec![Complex64::ZERO; 2 * n - 1];
            let reach = i.min(n - 1 - i);
            for c in 0..=reach {
                let p = amps[i + c] * amps[i - c].conj();
                products[n - 1 + c] = p;
                products[n - 1 - c] = p.conj();
            }
            let row = transform.apply(&products);
            let mut residue = 0.0f64;
            let values: Vec<f64> = row
                .iter()
                .map(|z| {
                    residue = residue.max(z.im.abs());
                    z.re / std::f64::consts::PI
                })
                .collect();
            (values, residue)
        })
        .collect();

    let residue = rows.iter().fold(0.0f64, |m, (_, r)| m.max(*r));
    if residue > IMAGINARY_RESIDUE_TOLERANCE {
        return Err(Error::CrossCheckFailed {
            context: "wigner imaginary residue",
            relative_error: residue,
        });
    }
    let values = DMatrix::from_fn(n, tau_grid.len(), |i, j| rows[i].0[j]);
    Ok(WignerMap {
        phi_grid: grid,
        tau_grid,
        values,
    })
}

/// Bin-wise time evolution e^{i Σ α_k ω_k δt}.
pub trait TimeEvolve: Sized {
    fn evolve(&self, alphas: &SignVector, delta_t: f64) -> Result<Self>;
}

impl TimeEvolve for Spectrum1D {
    fn evolve(&self, alphas: &SignVector, delta_t: f64) -> Result<Self> {
        alphas.ensure_len(1)?;
        let a = alphas.factor(0);
        let amplitudes = self
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(k, z)| z * Complex64::new(0.0, a * self.grid().point(k) * delta_t).exp())
            .collect();
        Spectrum1D::new(*self.grid(), amplitudes)
    }
}

impl TimeEvolve for Jsa2D {
    fn evolve(&self, alphas: &SignVector, delta_t: f64) -> Result<Self> {
        alphas.ensure_len(2)?;
        let (a1, a2) = (alphas.factor(0), alphas.factor(1));
        let g1 = *self.grid(Mode::One);
        let g2 = *self.grid(Mode::Two);
        let phase1: Vec<Complex64> = g1
            .points()
            .map(|w| Complex64::new(0.0, a1 * w * delta_t).exp())
            .collect();
        let phase2: Vec<Complex64> = g2
            .points()
            .map(|w| Complex64::new(0.0, a2 * w * delta_t).exp())
            .collect();
        let amplitudes =
            DMatrix::from_fn(g1.len(), g2.len(), |i, j| self.amplitudes()[(i, j)] * phase1[i] * phase2[j]);
        self.with_amplitudes(amplitudes)
    }
}

/// Schmidt spectrum of a bipartite amplitude.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtReport {
    /// Nonincreasing coefficients λ_k with Σ λ_k² = 1.
    pub coefficients: Vec<f64>,
    /// −Σ λ² log₂ λ², in bits.
    pub entropy_bits: f64,
    /// Participation ratio 1/Σ λ⁴.
    pub schmidt_number: f64,
    /// |Σ s² − 1| of the raw singular values before renormalization.
    pub norm_residue: f64,
}

/// Schmidt decomposition of the quadrature-weighted amplitude matrix.
pub fn schmidt(j: &Jsa2D) -> Result<SchmidtReport> {
    j.ensure_normalized()?;
    let weighted = weighted_amplitude(j);
    let (values, _) = schmidt_spectrum(&weighted, false);

    let total: f64 = values.iter().map(|s| s * s).sum();
    if total <= 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let norm_residue = (total - 1.0).abs();
    let scale = total.sqrt();
    let coefficients: Vec<f64> = values.iter().map(|s| s / scale).collect();

    let mut entropy_bits = 0.0;
    let mut purity = 0.0;
    for c in &coefficients {
        let p = c * c;
        if p > 0.0 {
            entropy_bits -= p * p.log2();
        }
        purity += p * p;
    }
    Ok(SchmidtReport {
        coefficients,
        entropy_bits,
        schmidt_number: 1.0 / purity,
        norm_residue,
    })
}

fn weighted_amplitude(j: &Jsa2D) -> DMatrix<Complex64> {
    let (n1, n2) = (j.grid(Mode::One).len(), j.grid(Mode::Two).len());
    let (h1, h2) = (j.grid(Mode::One).step(), j.grid(Mode::Two).step());
    DMatrix::from_fn(n1, n2, |i, k| {
        let w = (quad::weight(i, n1) * h1).sqrt() * (quad::weight(k, n2) * h2).sqrt();
        j.amplitudes()[(i, k)] * w
    })
}

type LeadingPair = (Vec<Complex64>, Vec<Complex64>);

/// Singular values of `m` in descending order, optionally with the leading
/// left/right pair such that M_ik ≈ s₁ · left_i · right_k.
///
/// Rows and columns carrying (essentially) no amplitude are cropped first:
/// they contribute only zero singular values, and dropping them removes
/// the huge degenerate null blocks that rotated amplitudes produce. The
/// spectrum comes from the Hermitian eigendecomposition of the smaller
/// Gram matrix of the cropped amplitude; the leading pair from power
/// iteration (its use is gated on a strongly separated λ₁).
fn schmidt_spectrum(
    m: &DMatrix<Complex64>,
    want_leading: bool,
) -> (Vec<f64>, Option<LeadingPair>) {
    let row_norms: Vec<f64> = (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|k| m[(i, k)].norm_sqr()).sum())
        .collect();
    let col_norms: Vec<f64> = (0..m.ncols())
        .map(|k| (0..m.nrows()).map(|i| m[(i, k)].norm_sqr()).sum())
        .collect();
    let row_max = row_norms.iter().cloned().fold(0.0f64, f64::max);
    let col_max = col_norms.iter().cloned().fold(0.0f64, f64::max);
    let keep_rows: Vec<usize> = (0..m.nrows())
        .filter(|&i| row_norms[i] > row_max * 1e-120)
        .collect();
    let keep_cols: Vec<usize> = (0..m.ncols())
        .filter(|&k| col_norms[k] > col_max * 1e-120)
        .collect();
    let cropped = DMatrix::from_fn(keep_rows.len(), keep_cols.len(), |i, k| {
        m[(keep_rows[i], keep_cols[k])]
    });

    let tall = cropped.nrows() >= cropped.ncols();
    let gram = if tall {
        cropped.adjoint() * &cropped
    } else {
        &cropped * cropped.adjoint()
    };
    let eig = crate::linalg::hermitian_eigenvalues(&gram)
        .expect("Gram spectra of finite amplitudes converge");
    let mut values: Vec<f64> = eig.iter().map(|v| v.max(0.0).sqrt()).collect();
    values.reverse();

    let leading = want_leading.then(|| {
        let (_, w) = crate::linalg::leading_hermitian_eigenpair(&gram);
        let s = values[0];
        let (left_cropped, right_cropped): (Vec<Complex64>, Vec<Complex64>) = if tall {
            let right: Vec<Complex64> = w.iter().map(|z| z.conj()).collect();
            let left: Vec<Complex64> = (&cropped * &w).iter().map(|z| z / s).collect();
            (left, right)
        } else {
            let left: Vec<Complex64> = w.iter().copied().collect();
            let right: Vec<Complex64> =
                (cropped.adjoint() * &w).iter().map(|z| (z / s).conj()).collect();
            (left, right)
        };
        let mut left = vec![Complex64::ZERO; m.nrows()];
        for (idx, &row) in keep_rows.iter().enumerate() {
            left[row] = left_cropped[idx];
        }
        let mut right = vec![Complex64::ZERO; m.ncols()];
        for (idx, &col) in keep_cols.iter().enumerate() {
            right[col] = right_cropped[idx];
        }
        (left, right)
    });
    (values, leading)
}

/// Amplitude resampled in orthonormal collective coordinates
/// Ω₊ = (α₁ω₁ + α₂ω₂)/√2, Ω₋ = (α₂ω₁ − α₁ω₂)/√2.
#[derive(Debug, Clone)]
pub struct RotatedJsa {
    /// The full amplitude over (Ω₊, Ω₋).
    pub jsa: Jsa2D,
    /// Leading Schmidt weight of the rotated amplitude.
    pub lambda1_sq: f64,
    /// Collective-mode factors f(Ω₊), g(Ω₋), present when the rotated
    /// amplitude is Schmidt-rank-1 within tolerance.
    pub factors: Option<(Spectrum1D, Spectrum1D)>,
}

/// Resample a pair amplitude into orthonormal collective coordinates and
/// attempt to factor it into f(Ω₊)·g(Ω₋).
///
/// Requires equal grid steps on both axes. The rotation is orthonormal so
/// resampling preserves the norm up to interpolation error; the result is
/// renormalized. States whose rotated Schmidt weight λ₁² < 0.999 come back
/// with `factors = None` and the full rotated amplitude.
pub fn collective_rotate(j: &Jsa2D, alphas: &SignVector) -> Result<RotatedJsa> {
    j.ensure_normalized()?;
    alphas.ensure_len(2)?;
    let g1 = *j.grid(Mode::One);
    let g2 = *j.grid(Mode::Two);
    let h = g1.step();
    if (g2.step() - h).abs() > 1e-12 * h {
        return Err(Error::InvalidArgument(format!(
            "collective rotation needs equal grid steps (got {} and {})",
            h,
            g2.step()
        )));
    }
    let (a1, a2) = (alphas.factor(0), alphas.factor(1));
    let sqrt2 = std::f64::consts::SQRT_2;

    // Rotated bounding box over the grid corners.
    let mut plus_lo = f64::INFINITY;
    let mut plus_hi = f64::NEG_INFINITY;
    let mut minus_lo = f64::INFINITY;
    let mut minus_hi = f64::NEG_INFINITY;
    for w1 in [g1.min(), g1.max()] {
        for w2 in [g2.min(), g2.max()] {
            let p = (a1 * w1 + a2 * w2) / sqrt2;
            let m = (a2 * w1 - a1 * w2) / sqrt2;
            plus_lo = plus_lo.min(p);
            plus_hi = plus_hi.max(p);
            minus_lo = minus_lo.min(m);
            minus_hi = minus_hi.max(m);
        }
    }
    let plus_len = ((plus_hi - plus_lo) / h).ceil() as usize + 1;
    let minus_len = ((minus_hi - minus_lo) / h).ceil() as usize + 1;
    let plus_grid = UniformGrid::new(plus_lo, plus_lo + (plus_len - 1) as f64 * h, plus_len)?;
    let minus_grid = UniformGrid::new(minus_lo, minus_lo + (minus_len - 1) as f64 * h, minus_len)?;

    let amps = j.amplitudes();
    let bilinear = |w1: f64, w2: f64| -> Complex64 {
        let x = (w1 - g1.min()) / h;
        let y = (w2 - g2.min()) / g2.step();
        if x < 0.0 || y < 0.0 || x > (g1.len() - 1) as f64 || y > (g2.len() - 1) as f64 {
            return Complex64::ZERO;
        }
        let i0 = (x.floor() as usize).min(g1.len() - 2);
        let j0 = (y.floor() as usize).min(g2.len() - 2);
        let fx = x - i0 as f64;
        let fy = y - j0 as f64;
        amps[(i0, j0)] * ((1.0 - fx) * (1.0 - fy))
            + amps[(i0 + 1, j0)] * (fx * (1.0 - fy))
            + amps[(i0, j0 + 1)] * ((1.0 - fx) * fy)
            + amps[(i0 + 1, j0 + 1)] * (fx * fy)
    };

    let rotated_amps = DMatrix::from_fn(plus_len, minus_len, |ip, im| {
        let p = plus_grid.point(ip);
        let m = minus_grid.point(im);
        let w1 = (a1 * p + a2 * m) / sqrt2;
        let w2 = (a2 * p - a1 * m) / sqrt2;
        bilinear(w1, w2)
    });
    let rotated = Jsa2D::new(plus_grid, minus_grid, rotated_amps)?.normalize()?;

    let weighted = weighted_amplitude(&rotated);
    let (values, leading) = schmidt_spectrum(&weighted, true);
    let total: f64 = values.iter().map(|s| s * s).sum();
    let lambda1_sq = values[0] * values[0] / total;

    let factors = if lambda1_sq >= FACTORIZABLE_LAMBDA1_SQ {
        let (left, right) = leading.expect("leading pair requested");
        let f_amps: Vec<Complex64> = left
            .iter()
            .enumerate()
            .map(|(i, z)| z / (quad::weight(i, plus_len) * h).sqrt())
            .collect();
        let g_amps: Vec<Complex64> = right
            .iter()
            .enumerate()
            .map(|(k, z)| z / (quad::weight(k, minus_len) * h).sqrt())
            .collect();
        let f = Spectrum1D::new(plus_grid, f_amps)?.normalize()?;
        let g = Spectrum1D::new(minus_grid, g_amps)?.normalize()?;
        Some((f, g))
    } else {
        None
    };

    Ok(RotatedJsa {
        jsa: rotated,
        lambda1_sq,
        factors,
    })
}

/// Measured Wigner translation of a photon pair under time evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftReport {
    pub delta_t: f64,
    /// τ-centroid displacement of the collective map in the orthonormal
    /// coordinate conjugate to Ω₊ = Σ α_i ω_i / √2.
    pub collective_shift_orthonormal: f64,
    /// The same displacement in the sum-coordinate convention
    /// T = Σ α_i τ_i (orthonormal value × √n).
    pub collective_shift_sum: f64,
    /// Arrival-time centroid displacement of each photon.
    pub marginal_shifts: Vec<f64>,
    /// collective_shift_sum / mean marginal shift; `None` when δt = 0.
    pub ratio: Option<f64>,
}

/// Collective Wigner maps of a pair before and after evolution, with the
/// measured shifts.
pub struct CollectiveShift {
    pub before: WignerMap,
    pub after: WignerMap,
    pub report: ShiftReport,
}

/// Evolve a factorizable pair by `delta_t`, compute the Wigner map of the
/// collective amplitude before and after, and measure the τ translation in
/// both conventions together with the single-photon marginal shifts.
///
/// For fully correlated pairs the sum-convention collective shift
/// approaches n·δt (n = 2) while each marginal moves by δt.
pub fn collective_wigner_shift_check(
    j: &Jsa2D,
    alphas: &SignVector,
    delta_t: f64,
) -> Result<CollectiveShift> {
    let rotated_before = collective_rotate(j, alphas)?;
    let (f_before, _) = rotated_before
        .factors
        .as_ref()
        .ok_or(Error::NotFactorizable {
            lambda1_sq: rotated_before.lambda1_sq,
        })?;

    let evolved = j.evolve(alphas, delta_t)?;
    let rotated_after = collective_rotate(&evolved, alphas)?;
    let (f_after, _) = rotated_after.factors.as_ref().ok_or(Error::NotFactorizable {
        lambda1_sq: rotated_after.lambda1_sq,
    })?;

    // τ window sized from the collective bandwidth (transform-limited
    // width 1/(2ΔΩ₊)) plus room for the translation itself.
    let plus_var = f_before.moments()?.variance.max(f_after.moments()?.variance);
    let time_std = 1.0 / (2.0 * plus_var.sqrt());
    let half = 6.0 * time_std + 2.0 * std::f64::consts::SQRT_2 * delta_t.abs();
    let tau_grid = default_tau_grid(f_before.grid(), half, 129)?;

    let before = wigner_single(f_before, tau_grid)?;
    let after = wigner_single(f_after, tau_grid)?;
    let orthonormal = after.tau_centroid_abs() - before.tau_centroid_abs();
    let sum_convention = std::f64::consts::SQRT_2 * orthonormal;

    let cov = j.covariance_from_grid()?;
    let det = cov[(0, 0)] * cov[(1, 1)] - cov[(0, 1)] * cov[(0, 1)];
    let mut marginal_shifts = Vec::with_capacity(2);
    for mode in [Mode::One, Mode::Two] {
        // Arrival-time spread of one photon of a real Gaussian amplitude:
        // Var(tᵢ) = (Σ⁻¹)ᵢᵢ/4. Real amplitudes carry no group delay, so
        // the window centers at zero.
        let var_t = match mode {
            Mode::One => cov[(1, 1)] / det / 4.0,
            Mode::Two => cov[(0, 0)] / det / 4.0,
        };
        let half_t = 6.0 * var_t.sqrt() + 2.0 * delta_t.abs();
        let taxis = UniformGrid::centered(0.0, half_t, 257)?;
        let p0 = arrival_time_density(j, alphas, 0.0, mode, taxis)?;
        let p1 = arrival_time_density(&evolved, alphas, 0.0, mode, taxis)?;
        marginal_shifts.push(p1.mean() - p0.mean());
    }

    let mean_marginal =
        marginal_shifts.iter().map(|s| s.abs()).sum::<f64>() / marginal_shifts.len() as f64;
    let ratio = if delta_t == 0.0 || mean_marginal < 1e-12 {
        None
    } else {
        Some(sum_convention.abs() / mean_marginal)
    };

    Ok(CollectiveShift {
        before,
        after,
        report: ShiftReport {
            delta_t,
            collective_shift_orthonormal: orthonormal,
            collective_shift_sum: sum_convention,
            marginal_shifts,
            ratio,
        },
    })
}
