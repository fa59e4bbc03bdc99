//! Householder QR and exact least squares.

use super::matrix::{dot, norm2, Matrix};
use super::LinalgError;

/// Relative pivot threshold below which a matrix is declared rank deficient.
const PIVOT_TOL: f64 = 1e-12;

/// Reduced QR factorization of an n x d matrix with n >= d.
///
/// Returns `(Q, R)` with `Q` n x d having orthonormal columns, `R` d x d
/// upper triangular with nonnegative diagonal (sign convention fixed so the
/// factorization is unique for full-rank input), and `Q R = A`.
pub fn qr_reduced(a: &Matrix) -> Result<(Matrix, Matrix), LinalgError> {
    let (n, d) = (a.rows(), a.cols());
    assert!(n >= d, "qr_reduced requires rows >= cols");

    // Householder reflectors stored per column.
    let mut w = a.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        let x: Vec<f64> = (j..n).map(|i| w.get(i, j)).collect();
        let xnorm = norm2(&x);
        let mut v = x;
        if xnorm > 0.0 {
            let alpha = if v[0] >= 0.0 { -xnorm } else { xnorm };
            v[0] -= alpha;
            let vnorm2 = dot(&v, &v);
            if vnorm2 > 0.0 {
                // Apply H = I - 2 v v^T / (v^T v) to the trailing block.
                for col in j..d {
                    let mut s = 0.0;
                    for (i, vi) in v.iter().enumerate() {
                        s += vi * w.get(j + i, col);
                    }
                    s *= 2.0 / vnorm2;
                    for (i, vi) in v.iter().enumerate() {
                        let cur = w.get(j + i, col);
                        w.set(j + i, col, cur - s * vi);
                    }
                }
            }
            w.set(j, j, alpha);
            for i in (j + 1)..n {
                w.set(i, j, 0.0);
            }
        }
        reflectors.push(v);
    }

    // Rank test on the pivots.
    let pivots: Vec<f64> = (0..d).map(|j| w.get(j, j).abs()).collect();
    let max_p = pivots.iter().cloned().fold(0.0f64, f64::max);
    let min_p = pivots.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_p == 0.0 || min_p <= PIVOT_TOL * max_p {
        return Err(LinalgError::RankDeficient);
    }

    // Accumulate Q = H_0 ... H_{d-1} applied to the first d columns of I_n.
    let mut q = Matrix::from_fn(n, d, |i, j| if i == j { 1.0 } else { 0.0 });
    for j in (0..d).rev() {
        let v = &reflectors[j];
        let vnorm2 = dot(v, v);
        if vnorm2 == 0.0 {
            continue;
        }
        for col in 0..d {
            let mut s = 0.0;
            for (i, vi) in v.iter().enumerate() {
                s += vi * q.get(j + i, col);
            }
            s *= 2.0 / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                let cur = q.get(j + i, col);
                q.set(j + i, col, cur - s * vi);
            }
        }
    }

    let mut r = Matrix::from_fn(d, d, |i, j| if j >= i { w.get(i, j) } else { 0.0 });

    // Fix signs so diag(R) >= 0.
    for j in 0..d {
        if r.get(j, j) < 0.0 {
            for col in j..d {
                let v = r.get(j, col);
                r.set(j, col, -v);
            }
            for i in 0..n {
                let v = q.get(i, j);
                q.set(i, j, -v);
            }
        }
    }

    Ok((q, r))
}

/// Solve the full-rank least squares problem `min_x ||A x - b||_2` via QR.
///
/// Returns the minimizer and the residual norm `||A x - b||_2`.
pub fn lstsq_exact(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64), LinalgError> {
    assert_eq!(a.rows(), b.len(), "lstsq shape mismatch");
    let (q, r) = qr_reduced(a)?;
    let y = q.transpose_matvec(b);
    let x = solve_upper_triangular(&r, &y);
    let mut resid = a.matvec(&x);
    for (ri, bi) in resid.iter_mut().zip(b) {
        *ri -= bi;
    }
    Ok((x, norm2(&resid)))
}

/// Back substitution for upper triangular `R x = y`; `R` must have nonzero
/// diagonal (guaranteed by the QR pivot test).
pub(crate) fn solve_upper_triangular(r: &Matrix, y: &[f64]) -> Vec<f64> {
    let d = r.cols();
    let mut x = vec![0.0; d];
    for i in (0..d).rev() {
        let mut s = y[i];
        for (j, xj) in x.iter().enumerate().skip(i + 1) {
            s -= r.get(i, j) * xj;
        }
        x[i] = s / r.get(i, i);
    }
    x
}
