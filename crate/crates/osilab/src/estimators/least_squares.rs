//! Sketch-and-solve least squares.

use super::{EstimatorError, LsInstance};
use crate::linalg::{lstsq_exact, norm2, pinv, qr_reduced, LinalgError, Matrix};

/// Result of one sketched solve.
#[derive(Debug, Clone)]
pub struct LsOutcome {
    pub x_tilde: Vec<f64>,
    /// `||A x~ - b|| / ||A x* - b||`; None when the exact problem has zero
    /// residual but the sketched solution misses it (no finite ratio exists).
    pub ratio: Option<f64>,
    /// The sketched matrix `Omega^T A` lost column rank and the minimum-norm
    /// solution was used.
    pub sketch_rank_deficient: bool,
    /// The exact residual is zero and the sketched solve failed to reproduce
    /// the exact fit.
    pub exact_fit_missed: bool,
}

/// Solve `min_x ||Omega^T (A x - b)||_2` and compare against the exact
/// solution.
///
/// The sketched problem is solved by QR when `Omega^T A` has full column
/// rank, otherwise by the minimum-norm pseudoinverse solution (flagged).
pub fn sketch_and_solve_ls(inst: &LsInstance, omega: &Matrix) -> Result<LsOutcome, EstimatorError> {
    assert_eq!(
        omega.rows(),
        inst.a().rows(),
        "sketch must match the ambient dimension"
    );
    let (_, exact_residual) = lstsq_exact(inst.a(), inst.b())?;

    let a_s = omega.transpose_matmul(inst.a()); // k x d
    let b_s = omega.transpose_matvec(inst.b());

    let mut rank_deficient = false;
    let x_tilde = if a_s.rows() >= a_s.cols() {
        match qr_reduced(&a_s) {
            Ok((q, r)) => {
                let y = q.transpose_matvec(&b_s);
                crate::linalg::solve_upper_triangular(&r, &y)
            }
            Err(LinalgError::RankDeficient) => {
                rank_deficient = true;
                pinv(&a_s)?.matvec(&b_s)
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        rank_deficient = true;
        pinv(&a_s)?.matvec(&b_s)
    };

    let mut resid = inst.a().matvec(&x_tilde);
    for (ri, bi) in resid.iter_mut().zip(inst.b()) {
        *ri -= bi;
    }
    let sketched_residual = norm2(&resid);

    let scale = norm2(inst.b()).max(1.0);
    if exact_residual <= 1e-14 * scale {
        // Zero-residual instance: report a flag instead of an infinite ratio.
        let missed = sketched_residual > 1e-12 * scale;
        return Ok(LsOutcome {
            x_tilde,
            ratio: if missed { None } else { Some(1.0) },
            sketch_rank_deficient: rank_deficient,
            exact_fit_missed: missed,
        });
    }

    Ok(LsOutcome {
        x_tilde,
        ratio: Some(sketched_residual / exact_residual),
        sketch_rank_deficient: rank_deficient,
        exact_fit_missed: false,
    })
}
