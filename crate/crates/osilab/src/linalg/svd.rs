//! One-sided Jacobi SVD and the factorizations built on it.

use super::matrix::{norm2, Matrix};
use super::LinalgError;

/// Reduced SVD `A = U diag(s) V^T` with `q = min(rows, cols)` retained
/// singular values sorted in nonincreasing order.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Matrix,
    pub singular_values: Vec<f64>,
    pub v: Matrix,
}

impl SvdFactors {
    /// Numerical rank with the standard cutoff
    /// `sigma_i > max(rows, cols) * eps * sigma_1`.
    pub fn rank(&self, rows: usize, cols: usize) -> usize {
        let s1 = self.singular_values.first().copied().unwrap_or(0.0);
        let cutoff = rows.max(cols) as f64 * f64::EPSILON * s1;
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

const JACOBI_TOL: f64 = 1e-15;
const MAX_SWEEPS: usize = 64;

/// Reduced singular value decomposition by one-sided Jacobi rotations.
///
/// Orthogonalizes the columns of the (tall) working matrix; every matrix in
/// scope is small enough that the quadratic sweep cost is irrelevant and the
/// payoff is machine-precision orthogonality of the factors.
pub fn svd(a: &Matrix) -> Result<SvdFactors, LinalgError> {
    if a.rows() >= a.cols() {
        svd_tall(a)
    } else {
        let f = svd_tall(&a.transpose())?;
        Ok(SvdFactors {
            u: f.v,
            singular_values: f.singular_values,
            v: f.u,
        })
    }
}

fn svd_tall(a: &Matrix) -> Result<SvdFactors, LinalgError> {
    let (n, d) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = Matrix::identity(d);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..d {
            for q in (p + 1)..d {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..n {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    app += wp * wp;
                    aqq += wq * wq;
                    apq += wp * wq;
                }
                if apq == 0.0 || apq.abs() <= JACOBI_TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (aqq - app) / (2.0 * apq);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let wp = w.get(i, p);
                    let wq = w.get(i, q);
                    w.set(i, p, c * wp - s * wq);
                    w.set(i, q, s * wp + c * wq);
                }
                for i in 0..d {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - s * vq);
                    v.set(i, q, s * vp + c * vq);
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    // Column norms are the singular values; sort descending.
    let mut order: Vec<usize> = (0..d).collect();
    let sigmas: Vec<f64> = (0..d).map(|j| norm2(&w.col(j))).collect();
    order.sort_by(|&i, &j| sigmas[j].partial_cmp(&sigmas[i]).unwrap());

    let singular_values: Vec<f64> = order.iter().map(|&j| sigmas[j]).collect();
    let v_sorted = Matrix::from_fn(d, d, |i, j| v.get(i, order[j]));
    let mut u = Matrix::zeros(n, d);
    for (jj, &j) in order.iter().enumerate() {
        let s = sigmas[j];
        if s > 0.0 {
            for i in 0..n {
                u.set(i, jj, w.get(i, j) / s);
            }
        }
    }
    fill_null_columns(&mut u, &singular_values);

    Ok(SvdFactors {
        u,
        singular_values,
        v: v_sorted,
    })
}

/// Replace U columns belonging to exactly-zero singular values with an
/// orthonormal completion, so U always has orthonormal columns.
fn fill_null_columns(u: &mut Matrix, sigmas: &[f64]) {
    let (n, d) = (u.rows(), u.cols());
    for (j, &sigma) in sigmas.iter().enumerate() {
        if sigma > 0.0 {
            continue;
        }
        let mut found = false;
        for e in 0..n {
            let mut cand = vec![0.0; n];
            cand[e] = 1.0;
            // Two Gram-Schmidt passes against all other columns.
            for _ in 0..2 {
                for jj in 0..d {
                    if jj == j {
                        continue;
                    }
                    let proj: f64 = (0..n).map(|i| cand[i] * u.get(i, jj)).sum();
                    for (i, c) in cand.iter_mut().enumerate() {
                        *c -= proj * u.get(i, jj);
                    }
                }
            }
            let nrm = norm2(&cand);
            if nrm > 0.5 {
                for (i, c) in cand.iter().enumerate() {
                    u.set(i, j, c / nrm);
                }
                found = true;
                break;
            }
        }
        debug_assert!(found, "failed to complete orthonormal basis");
    }
}

/// Numerical rank via SVD with the pinv cutoff.
pub fn rank(a: &Matrix) -> Result<usize, LinalgError> {
    Ok(svd(a)?.rank(a.rows(), a.cols()))
}

/// Moore-Penrose pseudoinverse via SVD with the cutoff
/// `sigma_i > max(rows, cols) * eps * sigma_1`.
pub fn pinv(a: &Matrix) -> Result<Matrix, LinalgError> {
    let f = svd(a)?;
    let r = f.rank(a.rows(), a.cols());
    let (n, d) = (a.rows(), a.cols());
    let mut out = Matrix::zeros(d, n);
    for j in 0..r {
        let inv = 1.0 / f.singular_values[j];
        for row in 0..d {
            let vj = f.v.get(row, j);
            if vj == 0.0 {
                continue;
            }
            for col in 0..n {
                let cur = out.get(row, col);
                out.set(row, col, cur + vj * inv * f.u.get(col, j));
            }
        }
    }
    Ok(out)
}

/// Best rank-r approximation (truncated SVD) and the Frobenius norm of the
/// discarded tail, `tail^2 = sum_{j>r} sigma_j^2`.
pub fn best_rank_r(a: &Matrix, r: usize) -> Result<(Matrix, f64), LinalgError> {
    let f = svd(a)?;
    let rk = f.rank(a.rows(), a.cols());
    if r < 1 || r >= rk {
        return Err(LinalgError::BadRank { r, max: rk });
    }
    let (n, d) = (a.rows(), a.cols());
    let mut a_r = Matrix::zeros(n, d);
    for j in 0..r {
        let s = f.singular_values[j];
        for row in 0..n {
            let us = f.u.get(row, j) * s;
            for col in 0..d {
                let cur = a_r.get(row, col);
                a_r.set(row, col, cur + us * f.v.get(col, j));
            }
        }
    }
    let tail_sq: f64 = f.singular_values[r..].iter().map(|s| s * s).sum();
    Ok((a_r, tail_sq.sqrt()))
}
