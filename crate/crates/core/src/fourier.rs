//! Quadrature Fourier transforms between arbitrary uniform grids.
//!
//! Computes g(y_m) = Σ_k w_k Δx f(x_k) e^{i c x_k y_m} for uniform input
//! and output grids, where w_k are trapezoid weights and `c` is the kernel
//! constant (−1 for frequency→time amplitudes, −2 for the Wigner kernel).
//!
//! The double-index phase e^{i c x_k y_m} has a constant increment
//! φ = c Δx Δy per (k, m) step, so the sum is a chirp-z transform and is
//! evaluated with Bluestein's identity km = (k² + m² − (k−m)²)/2 as one
//! FFT-sized convolution, independent of any resonance between the grids.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::UniformGrid;
use crate::quad;

/// Precomputed chirp-z evaluation of one grid-to-grid Fourier quadrature.
///
/// Construction fixes the geometry (input grid, output grid, kernel
/// constant); [`apply`](Self::apply) then transforms any sample vector on
/// that geometry. Reuse one instance when transforming many rows.
pub struct FourierQuadrature {
    n_in: usize,
    n_out: usize,
    conv_len: usize,
    /// w_k Δx e^{i c k Δx y0} e^{i φ k²/2}, multiplied into the input.
    pre: Vec<Complex64>,
    /// e^{i c x0 y_m} e^{i φ m²/2} / L, multiplied into the convolution output.
    post: Vec<Complex64>,
    /// FFT of the chirp kernel e^{−i φ j²/2}.
    chirp_hat: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
}

impl FourierQuadrature {
    pub fn new(x: &UniformGrid, y: &UniformGrid, kernel_constant: f64) -> Self {
        let n_in = x.len();
        let n_out = y.len();
        let c = kernel_constant;
        let phi = c * x.step() * y.step();

        let conv_len = (n_in + n_out - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(conv_len);
        let ifft = planner.plan_fft_inverse(conv_len);

        let quad_phase = |t: f64| Complex64::new(0.0, t).exp();

        let pre: Vec<Complex64> = (0..n_in)
            .map(|k| {
                let kf = k as f64;
                quad::weight(k, n_in)
                    * x.step()
                    * quad_phase(c * kf * x.step() * y.min() + 0.5 * phi * kf * kf)
            })
            .collect();

        // Chirp e^{−iφ j²/2} for j ∈ [−(n_in−1), n_out−1], laid out circularly.
        let mut chirp = vec![Complex64::ZERO; conv_len];
        for (m, slot) in chirp.iter_mut().take(n_out).enumerate() {
            let mf = m as f64;
            *slot = quad_phase(-0.5 * phi * mf * mf);
        }
        for k in 1..n_in {
            let kf = k as f64;
            chirp[conv_len - k] = quad_phase(-0.5 * phi * kf * kf);
        }
        fft.process(&mut chirp);
        let chirp_hat = chirp;

        let post: Vec<Complex64> = (0..n_out)
            .map(|m| {
                let mf = m as f64;
                quad_phase(c * x.min() * (y.min() + mf * y.step()) + 0.5 * phi * mf * mf)
                    / conv_len as f64
            })
            .collect();

        Self {
            n_in,
            n_out,
            conv_len,
            pre,
            post,
            chirp_hat,
            fft,
            ifft,
        }
    }

    /// Transform one sample vector (length = input grid) to the output grid.
    pub fn apply(&self, samples: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(samples.len(), self.n_in, "sample length must match input grid");
        let mut buf = vec![Complex64::ZERO; self.conv_len];
        for (k, s) in samples.iter().enumerate() {
            buf[k] = s * self.pre[k];
        }
        self.fft.process(&mut buf);
        for (b, c) in buf.iter_mut().zip(&self.chirp_hat) {
            *b *= c;
        }
        self.ifft.process(&mut buf);
        (0..self.n_out).map(|m| buf[m] * self.post[m]).collect()
    }
}

/// Direct O(N·M) evaluation of the same quadrature sum. Reference path for
/// tests and small inputs.
pub fn fourier_quadrature_direct(
    samples: &[Complex64],
    x: &UniformGrid,
    y: &UniformGrid,
    kernel_constant: f64,
) -> Vec<Complex64> {
    assert_eq!(samples.len(), x.len());
    let n = x.len();
    y.points()
        .map(|yv| {
            let mut acc = Complex64::ZERO;
            for (k, xv) in x.points().enumerate() {
                let phase = Complex64::new(0.0, kernel_constant * xv * yv).exp();
                acc += quad::weight(k, n) * samples[k] * phase;
            }
            acc * x.step()
        })
        .collect()
}
