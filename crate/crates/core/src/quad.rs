//! Trapezoid quadrature on uniform grids.
//!
//! All integrals in this crate use the trapezoid rule: spectral amplitudes
//! are smooth and sampled uniformly, so the endpoint half-weights are the
//! only correction needed over a plain Riemann sum. Summation order is
//! fixed (ascending index) so identical inputs always produce identical
//! floating-point results.

/// Trapezoid weight of sample `k` on a grid of `len` points (1/2 at the
/// endpoints, 1 inside).
#[inline]
pub fn weight(k: usize, len: usize) -> f64 {
    if k == 0 || k + 1 == len {
        0.5
    } else {
        1.0
    }
}

/// ∫ f dx for samples `f` with spacing `step`.
pub fn integrate(f: &[f64], step: f64) -> f64 {
    let n = f.len();
    let mut acc = 0.0;
    for (k, v) in f.iter().enumerate() {
        acc += weight(k, n) * v;
    }
    acc * step
}

/// ∫ f(x) g(x) dx where `g` maps the grid coordinate, e.g. `|x| x * p[k]`.
pub fn integrate_map(f: &[f64], step: f64, mut g: impl FnMut(usize, f64) -> f64) -> f64 {
    let n = f.len();
    let mut acc = 0.0;
    for (k, v) in f.iter().enumerate() {
        acc += weight(k, n) * g(k, *v);
    }
    acc * step
}

/// ∫∫ f dx dy for a row-major matrix `f` of shape `(rows, cols)` with the
/// given spacings.
pub fn integrate_2d(f: impl Fn(usize, usize) -> f64, rows: usize, cols: usize, step_row: f64, step_col: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..rows {
        let wi = weight(i, rows);
        let mut row_acc = 0.0;
        for j in 0..cols {
            row_acc += weight(j, cols) * f(i, j);
        }
        acc += wi * row_acc;
    }
    acc * step_row * step_col
}
