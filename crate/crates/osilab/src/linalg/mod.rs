//! Dense double-precision linear algebra kernels.
//!
//! Everything in this crate runs through the small row-major [`Matrix`] type:
//! Householder QR, one-sided Jacobi SVD, Moore-Penrose pseudoinverse,
//! exact least squares, truncated SVD, and symmetric eigendecompositions.
//! All matrices in scope are small (at most ~1024 x 64), so simple, exactly
//! reproducible kernels beat a BLAS backend here.

mod eigen;
mod matrix;
mod qr;
mod svd;

pub use eigen::{gram_min_eig, sym_eigen, sym_sqrt_psd};
pub use matrix::{dot, norm2, Matrix};
pub(crate) use qr::solve_upper_triangular;
pub use qr::{lstsq_exact, qr_reduced};
pub use svd::{best_rank_r, pinv, rank, svd, SvdFactors};

use thiserror::Error;

/// Errors reported by the dense kernels.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LinalgError {
    #[error("matrix is rank deficient (pivot ratio below 1e-12)")]
    RankDeficient,
    #[error("iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("rank {r} out of range 1..{max}")]
    BadRank { r: usize, max: usize },
    #[error("norm exponent p = {0} must be finite and >= 1")]
    BadExponent(f64),
    #[error("basis columns are not orthonormal (defect {0:.3e})")]
    NotOrthonormal(f64),
    #[error("matrix is not positive semidefinite (eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),
}

/// Entrywise p-norm `(sum |v_i|^p)^(1/p)` for finite `p >= 1`.
pub fn lp_norm(v: &[f64], p: f64) -> Result<f64, LinalgError> {
    if !p.is_finite() || p < 1.0 {
        return Err(LinalgError::BadExponent(p));
    }
    if p == 1.0 {
        return Ok(v.iter().map(|x| x.abs()).sum());
    }
    if p == 2.0 {
        return Ok(norm2(v));
    }
    Ok(v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}
