//! Symmetric eigendecomposition (cyclic Jacobi) and helpers built on it.

use super::matrix::Matrix;
use super::LinalgError;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix: returns eigenvalues in
/// nonincreasing order and the matrix of matching orthonormal eigenvectors
/// (as columns).
pub fn sym_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix), LinalgError> {
    assert_eq!(a.rows(), a.cols(), "sym_eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut q = Matrix::identity(n);
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for r in (p + 1)..n {
                off = off.max(m.get(p, r).abs());
            }
        }
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = m.get(p, r);
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m.get(r, r) - m.get(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // A <- J^T A J on rows/columns p and r.
                for i in 0..n {
                    let aip = m.get(i, p);
                    let air = m.get(i, r);
                    m.set(i, p, c * aip - s * air);
                    m.set(i, r, s * aip + c * air);
                }
                for i in 0..n {
                    let api = m.get(p, i);
                    let ari = m.get(r, i);
                    m.set(p, i, c * api - s * ari);
                    m.set(r, i, s * api + c * ari);
                }
                for i in 0..n {
                    let qip = q.get(i, p);
                    let qir = q.get(i, r);
                    q.set(i, p, c * qip - s * qir);
                    q.set(i, r, s * qip + c * qir);
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let eigvals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = Matrix::from_fn(n, n, |i, j| q.get(i, order[j]));
    Ok((eigvals, vecs))
}

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// -1e-12 are rejected; values in [-1e-12, 0] are clamped to zero.
pub fn sym_sqrt_psd(a: &Matrix) -> Result<Matrix, LinalgError> {
    let (vals, q) = sym_eigen(a)?;
    let n = a.rows();
    let mut roots = Vec::with_capacity(n);
    for &l in &vals {
        if l < -1e-12 {
            return Err(LinalgError::NotPositiveSemidefinite(l));
        }
        roots.push(l.max(0.0).sqrt());
    }
    let scaled = Matrix::from_fn(n, n, |i, j| q.get(i, j) * roots[j]);
    Ok(scaled.matmul(&q.transpose()))
}

/// Smallest eigenvalue of the Gram matrix `U^T Omega Omega^T U`.
///
/// For orthonormal `U` this equals the minimum of `||Omega^T x||_2^2` over
/// unit vectors `x` in range(U) -- the injectivity test statistic.
pub fn gram_min_eig(u: &Matrix, omega: &Matrix) -> Result<f64, LinalgError> {
    let defect = u.transpose_matmul(u).max_abs_dev_from_identity();
    if defect > 1e-8 {
        return Err(LinalgError::NotOrthonormal(defect));
    }
    assert_eq!(
        u.rows(),
        omega.rows(),
        "U and Omega must share the ambient dimension"
    );
    let b = omega.transpose_matmul(u); // k x s
    let g = b.transpose_matmul(&b); // s x s Gram
    let (vals, _) = sym_eigen(&g)?;
    Ok(*vals.last().expect("nonempty spectrum"))
}
