//! Precision limits for time-delay estimation.
//!
//! The estimation parameter θ is a time delay generated by the collective
//! frequency operator Σ α_i ω̂_i. For the pure states built by this crate
//! the quantum Fisher information is four times the generator's variance,
//! so every bound here reduces to a variance computation:
//!
//! * [`CollectiveGenerator::collective_variance`] — αᵀΣα, exact for
//!   analytic states, quadrature for grid states.
//! * [`overlap_qfi`] — finite-difference overlap form
//!   8(1 − |⟨ψ|ψ_dθ⟩|)/dθ², an independent route that must agree with
//!   4·variance to O((dθ·ΔΩ)²).
//! * [`classical_fisher`] — the classical information of one concrete
//!   measurement, never exceeding the quantum value.
//! * [`scaling_sweep`] — variance versus photon number for the correlated
//!   family at fixed correlation parameter η, exhibiting the
//!   quadratic-to-linear transition around n ≈ η/(1−η).

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fourier::FourierQuadrature;
use crate::grid::UniformGrid;
use crate::quad;
use crate::spectra::{
    build_heisenberg_family, build_separable, Density1D, GaussianState, Jsa2D, Mode,
    ModeStatistics, SignVector, Spectrum1D,
};

/// How a variance/QFI figure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    AnalyticGaussian,
    GridQuadrature,
    Overlap,
}

/// Variance of the collective generator, the derived quantum Fisher
/// information, and the Cramér–Rao bound for ν repetitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiReport {
    pub variance_omega: f64,
    /// 4 × variance (pure states, unitary evolution).
    pub qfi: f64,
    /// δθ ≥ 1/√(ν·qfi) = 1/(2√ν·ΔΩ).
    pub crb: f64,
    pub method: Method,
    pub nu: u64,
}

impl QfiReport {
    pub fn new(variance_omega: f64, method: Method, nu: u64) -> Result<Self> {
        if nu < 1 {
            return Err(Error::InvalidArgument("nu must be at least 1".into()));
        }
        if !(variance_omega > 0.0) {
            return Err(Error::NonPositiveFisher(4.0 * variance_omega));
        }
        let qfi = 4.0 * variance_omega;
        Ok(Self {
            variance_omega,
            qfi,
            crb: 1.0 / (nu as f64 * qfi).sqrt(),
            method,
            nu,
        })
    }
}

/// Coherent state: amplitude β in a single spatial mode with normalized
/// spectrum S(ω).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentSpec {
    beta: Complex64,
    spectrum: Spectrum1D,
}

impl CoherentSpec {
    pub fn new(beta: Complex64, spectrum: Spectrum1D) -> Result<Self> {
        let spectrum = spectrum.normalize()?;
        Ok(Self { beta, spectrum })
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn spectrum(&self) -> &Spectrum1D {
        &self.spectrum
    }
}

/// States on which the collective generator Σ α_i ω̂_i has a variance.
pub trait CollectiveGenerator {
    /// Number of photons (and required sign-vector length).
    fn photon_count(&self) -> usize;

    /// (ΔΩ̂)² = Σᵢ (Δω_i)² + Σ_{i≠j} α_i α_j Cov(ω_i, ω_j).
    fn collective_variance(&self, alphas: &SignVector) -> Result<f64>;
}

impl CollectiveGenerator for GaussianState {
    fn photon_count(&self) -> usize {
        self.n()
    }

    fn collective_variance(&self, alphas: &SignVector) -> Result<f64> {
        self.cov().quadratic_form(alphas)
    }
}

impl CollectiveGenerator for Jsa2D {
    fn photon_count(&self) -> usize {
        2
    }

    fn collective_variance(&self, alphas: &SignVector) -> Result<f64> {
        alphas.ensure_len(2)?;
        let c = self.covariance_from_grid()?;
        let (a1, a2) = (alphas.factor(0), alphas.factor(1));
        Ok(a1 * a1 * c[(0, 0)] + a2 * a2 * c[(1, 1)] + 2.0 * a1 * a2 * c[(0, 1)])
    }
}

/// Generator variance for states that are separable across spatial modes,
/// from per-mode photon-number and frequency statistics:
/// Σᵢ (⟨n̂ᵢ⟩ (Δωᵢ)² + (Δn̂ᵢ)² ω̄ᵢ²).
///
/// The signs only enter quadratically (αᵢ² = 1), so they drop out; the
/// sign vector is validated for length and otherwise unused.
pub fn separable_mode_variance(modes: &[ModeStatistics], alphas: &SignVector) -> Result<f64> {
    alphas.ensure_len(modes.len())?;
    let mut acc = 0.0;
    for m in modes {
        acc += m.mean_n * m.var_omega + m.var_n * m.mean_omega * m.mean_omega;
    }
    Ok(acc)
}

/// Generator variance of a coherent state: |β|² ∫ ω² |S(ω)|² dω.
pub fn coherent_variance(c: &CoherentSpec) -> Result<f64> {
    let moments = c.spectrum().moments()?;
    Ok(c.beta().norm_sqr() * moments.mean_square)
}

/// Quantum Fisher information from the overlap with the state displaced by
/// `dtheta`: 8(1 − |⟨ψ_θ|ψ_θ₊dθ⟩|)/dθ².
///
/// The step must satisfy dθ·ΔΩ < 0.1 or the quadratic expansion underlying
/// the estimator breaks down. Agreement with 4·variance is O((dθ·ΔΩ)²).
pub fn overlap_qfi(j: &Jsa2D, alphas: &SignVector, dtheta: f64) -> Result<f64> {
    if !(dtheta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dtheta must be positive (got {dtheta})"
        )));
    }
    let variance = j.collective_variance(alphas)?;
    let product = dtheta * variance.max(0.0).sqrt();
    if product >= 0.1 {
        return Err(Error::StepTooLarge { product });
    }

    let (g1, g2) = (j.grid(Mode::One), j.grid(Mode::Two));
    let (n1, n2) = (g1.len(), g2.len());
    let (a1, a2) = (alphas.factor(0), alphas.factor(1));
    let mut overlap = Complex64::ZERO;
    for i in 0..n1 {
        let wi = quad::weight(i, n1);
        let phase1 = a1 * g1.point(i) * dtheta;
        for k in 0..n2 {
            let p = wi * quad::weight(k, n2) * j.amplitudes()[(i, k)].norm_sqr();
            let phase = phase1 + a2 * g2.point(k) * dtheta;
            overlap += p * Complex64::new(0.0, phase).exp();
        }
    }
    overlap *= g1.step() * g2.step();
    Ok(8.0 * (1.0 - overlap.norm()) / (dtheta * dtheta))
}

/// Overlap QFI with one Richardson extrapolation step: evaluates at `h` and
/// `h/2` and cancels the O(h²) error term.
pub fn overlap_qfi_richardson(j: &Jsa2D, alphas: &SignVector, h: f64) -> Result<f64> {
    let coarse = overlap_qfi(j, alphas, h)?;
    let fine = overlap_qfi(j, alphas, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Default overlap step 0.01/ΔΩ for the state's collective bandwidth.
pub fn default_overlap_step(j: &Jsa2D, alphas: &SignVector) -> Result<f64> {
    let variance = j.collective_variance(alphas)?;
    if !(variance > 0.0) {
        return Err(Error::NonPositiveFisher(4.0 * variance));
    }
    Ok(0.01 / variance.sqrt())
}

/// Guard below which an outcome bin is excluded from the Fisher sum.
const FISHER_DENSITY_GUARD: f64 = 1e-12;

/// Classical Fisher information F(θ) = ∫ (∂p/∂θ)²/p dx from densities
/// sampled at θ−dθ, θ, θ+dθ (central difference in θ).
pub fn classical_fisher(
    p_minus: &Density1D,
    p_center: &Density1D,
    p_plus: &Density1D,
    dtheta: f64,
) -> Result<f64> {
    if !(dtheta > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "dtheta must be positive (got {dtheta})"
        )));
    }
    if p_minus.grid() != p_center.grid() || p_plus.grid() != p_center.grid() {
        return Err(Error::InvalidArgument(
            "densities must share one outcome grid".into(),
        ));
    }
    for p in [p_minus, p_center, p_plus] {
        p.ensure_normalized()?;
    }
    let n = p_center.values().len();
    let step = p_center.grid().step();
    let mut acc = 0.0;
    for k in 0..n {
        let p0 = p_center.values()[k];
        if p0 <= FISHER_DENSITY_GUARD {
            continue;
        }
        let dp = (p_plus.values()[k] - p_minus.values()[k]) / (2.0 * dtheta);
        acc += quad::weight(k, n) * dp * dp / p0;
    }
    Ok(acc * step)
}

/// Cramér–Rao lower bound δθ ≥ 1/√(ν·F) for Fisher information `fisher`
/// and ν independent repetitions.
pub fn cramer_rao(fisher: f64, nu: u64) -> Result<f64> {
    if nu < 1 {
        return Err(Error::InvalidArgument("nu must be at least 1".into()));
    }
    if !(fisher > 0.0) {
        return Err(Error::NonPositiveFisher(fisher));
    }
    Ok(1.0 / (nu as f64 * fisher).sqrt())
}

/// One row of a scaling sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingPoint {
    pub n: u64,
    /// Collective variance n²Δω²/(n(1−η)+η).
    pub variance: f64,
    /// 4 × variance.
    pub qfi: f64,
    /// Single-shot (ν = 1) Cramér–Rao bound.
    pub crb: f64,
    /// d log V / d log n, centered where possible, one-sided at the ends.
    pub local_slope: f64,
}

/// Collective variance versus photon number at fixed correlation η.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub eta: f64,
    pub delta_omega: f64,
    pub points: Vec<ScalingPoint>,
    /// n ≈ η/(1−η), the crossover from quadratic to linear scaling
    /// (infinite at η = 1, where scaling stays quadratic).
    pub transition_n: f64,
}

/// Sweep the correlated family over `n_list` at correlation η.
///
/// Each point is evaluated twice — by the closed form
/// n²Δω²/(n(1−η)+η) and by constructing the covariance with the
/// self-consistent transverse width σ² = (1−η)V/n and taking the
/// quadratic form — and the two routes must agree to 1e-9 relative.
pub fn scaling_sweep(eta: f64, delta_omega: f64, n_list: &[u64]) -> Result<ScalingReport> {
    if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
        return Err(Error::InvalidEta(eta));
    }
    if delta_omega <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta_omega must be positive (got {delta_omega})"
        )));
    }
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("n_list must be non-empty".into()));
    }
    if n_list[0] < 1 || n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "n_list must be strictly increasing with entries >= 1".into(),
        ));
    }

    let dw2 = delta_omega * delta_omega;
    let mut variances = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let closed = nf * nf * dw2 / (nf * (1.0 - eta) + eta);

        let sigma = ((1.0 - eta) * closed / nf).sqrt();
        let constructed = if n == 1 {
            build_separable(1, delta_omega, &[0.0])?
                .cov()
                .quadratic_form(&SignVector::all_plus(1))?
        } else {
            build_heisenberg_family(n as usize, delta_omega, sigma, &vec![0.0; n as usize])?
                .cov()
                .quadratic_form(&SignVector::all_plus(n as usize))?
        };
        let relative_error = (constructed - closed).abs() / closed;
        if relative_error > 1e-9 {
            return Err(Error::CrossCheckFailed {
                context: "scaling_sweep closed form vs covariance construction",
                relative_error,
            });
        }
        variances.push(closed);
    }

    let logs: Vec<(f64, f64)> = n_list
        .iter()
        .zip(&variances)
        .map(|(n, v)| ((*n as f64).ln(), v.ln()))
        .collect();
    let slope = |a: (f64, f64), b: (f64, f64)| (b.1 - a.1) / (b.0 - a.0);
    let m = logs.len();
    let points = (0..m)
        .map(|k| {
            let local_slope = if m == 1 {
                f64::NAN
            } else if k == 0 {
                slope(logs[0], logs[1])
            } else if k + 1 == m {
                slope(logs[m - 2], logs[m - 1])
            } else {
                slope(logs[k - 1], logs[k + 1])
            };
            let variance = variances[k];
            ScalingPoint {
                n: n_list[k],
                variance,
                qfi: 4.0 * variance,
                crb: 1.0 / (4.0 * variance).sqrt(),
                local_slope,
            }
        })
        .collect();

    let transition_n = if eta >= 1.0 {
        f64::INFINITY
    } else {
        eta / (1.0 - eta)
    };
    Ok(ScalingReport {
        eta,
        delta_omega,
        points,
        transition_n,
    })
}

/// Least-squares exponent of V ∝ n^p in log-log coordinates.
pub fn fit_scaling_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InsufficientPoints(points.len()));
    }
    if points.iter().any(|(n, v)| *n <= 0.0 || *v <= 0.0) {
        return Err(Error::NonPositiveValue);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|(n, v)| (n.ln(), v.ln())).collect();
    let m = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::InvalidArgument(
            "points must span more than one n value".into(),
        ));
    }
    Ok((m * sxy - sx * sy) / denom)
}

/// Arrival-time density of one photon of a pair after evolving for time
/// `theta`: the frequency axis of that photon is Fourier-transformed to the
/// time grid and the other photon is traced out.
///
/// Evolution multiplies the amplitude by exp(i Σ α_i ω_i θ), so with
/// α_i = +1 the density is the unevolved one delayed by θ.
pub fn arrival_time_density(
    j: &Jsa2D,
    alphas: &SignVector,
    theta: f64,
    mode: Mode,
    time_grid: UniformGrid,
) -> Result<Density1D> {
    j.ensure_normalized()?;
    alphas.ensure_len(2)?;

    let (own, other) = match mode {
        Mode::One => (Mode::One, Mode::Two),
        Mode::Two => (Mode::Two, Mode::One),
    };
    let own_grid = *j.grid(own);
    let other_grid = *j.grid(other);
    let transform = FourierQuadrature::new(&own_grid, &time_grid, -1.0);
    // The traced-out photon's evolution phase is constant along its own
    // axis and cancels in |·|²; only the transformed axis needs its phase.
    let a_own = match mode {
        Mode::One => alphas.factor(0),
        Mode::Two => alphas.factor(1),
    };

    let mut values = vec![0.0; time_grid.len()];
    let mut column = vec![Complex64::ZERO; own_grid.len()];
    for q in 0..other_grid.len() {
        for (k, slot) in column.iter_mut().enumerate() {
            let amp = match mode {
                Mode::One => j.amplitudes()[(k, q)],
                Mode::Two => j.amplitudes()[(q, k)],
            };
            let phase = Complex64::new(0.0, a_own * own_grid.point(k) * theta).exp();
            *slot = amp * phase;
        }
        let time_amplitude = transform.apply(&column);
        let w = quad::weight(q, other_grid.len()) * other_grid.step();
        for (v, t) in values.iter_mut().zip(&time_amplitude) {
            *v += w * t.norm_sqr();
        }
    }
    // 1/(2π) from the |FT|² convention ψ(t) = (2π)^{-1/2} ∫ S e^{−iωt} dω.
    let scale = 1.0 / (2.0 * std::f64::consts::PI);
    for v in values.iter_mut() {
        *v *= scale;
    }
    Density1D::new(time_grid, values)
}

/// Arrival-time density of a single photon spectrum evolved for `theta`.
pub fn arrival_time_density_single(
    s: &Spectrum1D,
    alphas: &SignVector,
    theta: f64,
    time_grid: UniformGrid,
) -> Result<Density1D> {
    s.ensure_normalized()?;
    alphas.ensure_len(1)?;
    let transform = FourierQuadrature::new(s.grid(), &time_grid, -1.0);
    let phased: Vec<Complex64> = s
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(k, a)| a * Complex64::new(0.0, alphas.factor(0) * s.grid().point(k) * theta).exp())
        .collect();
    let time_amplitude = transform.apply(&phased);
    let scale = 1.0 / (2.0 * std::f64::consts::PI);
    let values = time_amplitude.iter().map(|z| scale * z.norm_sqr()).collect();
    Density1D::new(time_grid, values)
}

/// Arrival-time standard deviation of each photon of a two-photon real
/// Gaussian amplitude with frequency covariance Σ: Var(tᵢ) = (Σ⁻¹)ᵢᵢ/4.
/// Used to size default time grids.
pub fn arrival_time_std(g: &GaussianState) -> Result<(f64, f64)> {
    if g.n() != 2 {
        return Err(Error::UnsupportedN(g.n()));
    }
    let s11 = g.cov().entry(0, 0);
    let s22 = g.cov().entry(1, 1);
    let s12 = g.cov().entry(0, 1);
    let det = s11 * s22 - s12 * s12;
    if det <= 0.0 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: det,
        });
    }
    Ok(((s22 / det / 4.0).sqrt(), (s11 / det / 4.0).sqrt()))
}
