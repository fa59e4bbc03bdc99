//! lp regression by iteratively reweighted least squares, plus the sketched
//! variant.

use super::{EstimatorError, LpInstance};
use crate::linalg::{lp_norm, lstsq_exact, qr_reduced, LinalgError, Matrix};

/// Smoothing-continuation schedule for the IRLS objective
/// `sum_i (r_i^2 + mu)^{p/2}`.
const MU_STAGES: &[f64] = &[1e-4, 1e-6, 1e-8, 1e-10, 1e-12];
const MAX_ITERATIONS: usize = 500;
const REL_DECREASE_TOL: f64 = 1e-10;
/// Stop a stage once the unsmoothed objective has stalled this many
/// iterations. For p < 2 the smoothed objective can keep creeping along a
/// flat segment of the true objective (every point of which is already
/// optimal), so smoothed progress alone is the wrong signal.
const STALL_PATIENCE: usize = 10;

fn smoothed_objective(a: &Matrix, b: &[f64], x: &[f64], p: f64, mu: f64) -> f64 {
    let r = a.matvec(x);
    r.iter()
        .zip(b)
        .map(|(ri, bi)| ((ri - bi).powi(2) + mu).powf(p / 2.0))
        .sum()
}

fn true_objective(a: &Matrix, b: &[f64], x: &[f64], p: f64) -> f64 {
    let mut r = a.matvec(x);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri -= bi;
    }
    lp_norm(&r, p).expect("validated p")
}

/// Minimize `||A x - b||_p` for finite `p >= 1` and full-column-rank A.
///
/// Runs IRLS on the smoothed objective with decreasing smoothing, warm
/// starting each stage and backtracking along the IRLS direction (a descent
/// direction for the smoothed objective at any p >= 1, since the reweighted
/// normal matrix is positive definite).
pub fn lp_regress(a: &Matrix, b: &[f64], p: f64) -> Result<Vec<f64>, EstimatorError> {
    if !p.is_finite() || p < 1.0 {
        return Err(LinalgError::BadExponent(p).into());
    }
    assert_eq!(a.rows(), b.len(), "lp_regress shape mismatch");
    let (n, d) = (a.rows(), a.cols());
    assert!(n >= d, "lp_regress needs rows >= cols");

    // p = 2 is plain least squares and needs no smoothing.
    let (x2, _) = lstsq_exact(a, b)?;
    if p == 2.0 {
        return Ok(x2);
    }

    let mut x = x2;
    let mut best = (true_objective(a, b, &x, p), x.clone());
    let mut iterations = 0usize;
    for &mu in MU_STAGES {
        let mut obj = smoothed_objective(a, b, &x, p, mu);
        let mut stalled = 0usize;
        loop {
            if iterations >= MAX_ITERATIONS {
                return Err(EstimatorError::NoConvergence {
                    iterations: MAX_ITERATIONS,
                    best: best.1,
                });
            }
            iterations += 1;

            let r = a.matvec(&x);
            let weights: Vec<f64> = r
                .iter()
                .zip(b)
                .map(|(ri, bi)| ((ri - bi).powi(2) + mu).powf((p - 2.0) / 2.0))
                .collect();
            let scaled_a = Matrix::from_fn(n, d, |i, j| weights[i].sqrt() * a.get(i, j));
            let scaled_b: Vec<f64> = b
                .iter()
                .zip(&weights)
                .map(|(bi, w)| w.sqrt() * bi)
                .collect();
            let (x_ls, _) = lstsq_exact(&scaled_a, &scaled_b)?;

            // Backtrack along the IRLS direction until the smoothed
            // objective decreases.
            let direction: Vec<f64> = x_ls.iter().zip(&x).map(|(n, o)| n - o).collect();
            let mut gamma = 1.0;
            let mut accepted = None;
            while gamma > 1e-10 {
                let cand: Vec<f64> = x
                    .iter()
                    .zip(&direction)
                    .map(|(xi, di)| xi + gamma * di)
                    .collect();
                let cand_obj = smoothed_objective(a, b, &cand, p, mu);
                if cand_obj < obj {
                    accepted = Some((cand, cand_obj));
                    break;
                }
                gamma *= 0.5;
            }
            let Some((next_x, next_obj)) = accepted else {
                break; // stationary at this smoothing level
            };
            let decrease = (obj - next_obj) / next_obj.max(f64::MIN_POSITIVE);
            x = next_x;
            obj = next_obj;

            let true_obj = true_objective(a, b, &x, p);
            if true_obj < best.0 * (1.0 - 1e-13) {
                best = (true_obj, x.clone());
                stalled = 0;
            } else {
                if true_obj < best.0 {
                    best = (true_obj, x.clone());
                }
                stalled += 1;
            }
            if decrease < REL_DECREASE_TOL || stalled >= STALL_PATIENCE {
                break;
            }
        }
    }
    Ok(best.1)
}

/// Result of one sketched lp solve.
#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub x_tilde: Vec<f64>,
    /// `||A x~ - b||_p / ||A x* - b||_p`; None when the exact problem fits
    /// b exactly but the sketched solution does not.
    pub ratio: Option<f64>,
    pub exact_fit_missed: bool,
}

/// Solve `min_x ||Omega^T (A x - b)||_p` and compare against the exact lp
/// solution of the original instance.
pub fn lp_sketch_and_solve(inst: &LpInstance, omega: &Matrix) -> Result<LpOutcome, EstimatorError> {
    assert_eq!(
        omega.rows(),
        inst.a().rows(),
        "sketch must match the ambient dimension"
    );
    let p = inst.p();
    let x_star = lp_regress(inst.a(), inst.b(), p)?;
    let mut exact_resid = inst.a().matvec(&x_star);
    for (ri, bi) in exact_resid.iter_mut().zip(inst.b()) {
        *ri -= bi;
    }
    let denom = lp_norm(&exact_resid, p)?;

    let a_s = omega.transpose_matmul(inst.a());
    let b_s = omega.transpose_matvec(inst.b());
    if a_s.rows() < a_s.cols() {
        return Err(LinalgError::RankDeficient.into());
    }
    qr_reduced(&a_s)?; // propagate rank deficiency of the sketched matrix
    let x_tilde = lp_regress(&a_s, &b_s, p)?;

    let mut resid = inst.a().matvec(&x_tilde);
    for (ri, bi) in resid.iter_mut().zip(inst.b()) {
        *ri -= bi;
    }
    let num = lp_norm(&resid, p)?;

    let scale = lp_norm(inst.b(), p)?.max(1.0);
    if denom <= 1e-14 * scale {
        let missed = num > 1e-10 * scale;
        return Ok(LpOutcome {
            x_tilde,
            ratio: if missed { None } else { Some(1.0) },
            exact_fit_missed: missed,
        });
    }
    Ok(LpOutcome {
        x_tilde,
        ratio: Some(num / denom),
        exact_fit_missed: false,
    })
}
