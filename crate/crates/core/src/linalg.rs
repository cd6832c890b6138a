//! Dense Hermitian eigenvalue routines used by the Schmidt machinery.
//!
//! Schmidt spectra are eigenvalues of Gram matrices of amplitude samples.
//! Those matrices are Hermitian positive semidefinite but often carry
//! large zero blocks and clusters of (near-)degenerate tiny eigenvalues,
//! a structure on which general-purpose SVD/eigen iterations have been
//! observed to emit NaN. The classic Householder-tridiagonalize +
//! implicit-shift QL pipeline below handles them without drama and is
//! fully deterministic.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues (ascending) of a Hermitian matrix.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.ncols(),
        });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)].re]);
    }
    let (d, e) = hermitian_tridiagonalize(a);
    tridiagonal_eigenvalues(d, e)
}

/// Dominant eigenpair of a Hermitian positive semidefinite matrix by power
/// iteration (deterministic start, fixed tolerance). Intended for spectra
/// with a strongly separated leading eigenvalue.
pub fn leading_hermitian_eigenpair(g: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let n = g.nrows();
    let start = (0..n)
        .max_by(|&i, &j| {
            g[(i, i)]
                .re
                .partial_cmp(&g[(j, j)].re)
                .expect("finite diagonal")
        })
        .unwrap_or(0);
    let mut v = DVector::from_element(n, Complex64::ZERO);
    v[start] = Complex64::new(1.0, 0.0);

    let mut value = g[(start, start)].re;
    for _ in 0..256 {
        let mut w = g * &v;
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        w /= Complex64::new(norm, 0.0);
        let gv = g * &w;
        let new_value = w.dotc(&gv).re;
        let residual = (&gv - &w * Complex64::new(new_value, 0.0)).norm();
        v = w;
        value = new_value;
        if residual <= 1e-13 * value.abs().max(1e-300) {
            break;
        }
    }
    (value, v)
}

/// Reduce a Hermitian matrix to real symmetric tridiagonal form by
/// Householder similarity transforms; returns (diagonal, subdiagonal
/// magnitudes). Phases on the subdiagonal are dropped — a diagonal unitary
/// similarity absorbs them without changing eigenvalues.
fn hermitian_tridiagonalize(a: &DMatrix<Complex64>) -> (Vec<f64>, Vec<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut e = vec![0.0; n - 1];

    for k in 0..n.saturating_sub(2) {
        let x_norm_sq: f64 = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum();
        let x_norm = x_norm_sq.sqrt();
        e[k] = x_norm;
        if x_norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * x_norm;

        // v = x − α e₁, normalized. When x is already α e₁ the column is
        // reduced and no reflection is needed.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if v_norm_sq <= x_norm_sq * 1e-60 {
            a[(k + 1, k)] = alpha;
            continue;
        }
        let inv = 1.0 / v_norm_sq.sqrt();
        for z in v.iter_mut() {
            *z *= inv;
        }

        a[(k + 1, k)] = alpha;
        for i in k + 2..n {
            a[(i, k)] = Complex64::ZERO;
        }
        a[(k, k + 1)] = alpha.conj();
        for j in k + 2..n {
            a[(k, j)] = Complex64::ZERO;
        }

        // Trailing block update B ← B − 2vw† − 2wv† + 4c·vv†, w = Bv,
        // c = v†Bv (real for Hermitian B).
        let m = n - (k + 1);
        let mut w = vec![Complex64::ZERO; m];
        for (wi, row) in w.iter_mut().zip(0..m) {
            let mut acc = Complex64::ZERO;
            for col in 0..m {
                acc += a[(k + 1 + row, k + 1 + col)] * v[col];
            }
            *wi = acc;
        }
        let c: f64 = v
            .iter()
            .zip(&w)
            .map(|(vi, wi)| (vi.conj() * wi).re)
            .sum();
        for row in 0..m {
            let vi = v[row];
            let wi = w[row];
            for col in 0..m {
                let update = vi * w[col].conj() * 2.0 + wi * v[col].conj() * 2.0
                    - vi * v[col].conj() * (4.0 * c);
                a[(k + 1 + row, k + 1 + col)] -= update;
            }
        }
    }

    if n >= 2 {
        e[n - 2] = a[(n - 1, n - 2)].norm();
    }
    let d = (0..n).map(|i| a[(i, i)].re).collect();
    (d, e)
}

/// Implicit-shift QL eigenvalues of a symmetric tridiagonal matrix with
/// diagonal `d` and subdiagonal `e` (`e[i]` couples rows i and i+1).
fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    e.push(0.0);
    // Deflate on the local diagonal scale or, for graded matrices whose
    // trailing eigenvalues underflow toward zero, on the overall norm;
    // either way the perturbation stays below ε‖A‖.
    let anorm = (0..n).fold(0.0f64, |acc, i| {
        let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
        acc.max(d[i].abs() + e[i].abs() + left)
    });
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= f64::EPSILON * anorm {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > 64 {
                return Err(Error::CrossCheckFailed {
                    context: "tridiagonal QL did not converge",
                    relative_error: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.abs().copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(d)
}
