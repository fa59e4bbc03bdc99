//! Rangefinder low-rank approximation `A~ = (A Omega)(A Omega)^+ A`.

use super::{EstimatorError, LowRankInstance};
use crate::linalg::{pinv, Matrix};

#[derive(Debug, Clone)]
pub struct RsvdOutcome {
    pub a_tilde: Matrix,
    /// `||A - A~||_F / ||A - A_r||_F`; at least 1 up to roundoff because the
    /// truncated SVD denominator is optimal.
    pub ratio: f64,
}

/// Form the sample matrix `Y = A Omega` and project onto its range.
///
/// `A Omega = 0` is valid and yields `A~ = 0` (a large but finite ratio).
pub fn rangefinder_rsvd(
    inst: &LowRankInstance,
    omega: &Matrix,
) -> Result<RsvdOutcome, EstimatorError> {
    assert_eq!(
        omega.rows(),
        inst.a().cols(),
        "sketch must act on the column space"
    );
    let y = inst.a().matmul(omega); // n x k
    let y_pinv = pinv(&y)?; // k x n
    let a_tilde = y.matmul(&y_pinv.matmul(inst.a())); // Y (Y^+ A)
    let err = inst.a().sub(&a_tilde).frobenius_norm();
    Ok(RsvdOutcome {
        a_tilde,
        ratio: err / inst.tail_frob(),
    })
}
