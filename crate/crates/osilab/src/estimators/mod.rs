//! The three sketched estimators under study: sketch-and-solve least
//! squares, the rangefinder low-rank approximation, and lp sketch-and-solve
//! with an inner IRLS solver.

mod least_squares;
mod lp;
mod rsvd;

pub use least_squares::{sketch_and_solve_ls, LsOutcome};
pub use lp::{lp_regress, lp_sketch_and_solve, LpOutcome};
pub use rsvd::{rangefinder_rsvd, RsvdOutcome};

use crate::linalg::{qr_reduced, LinalgError, Matrix};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EstimatorError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("lp solver failed to converge within {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        /// Best iterate found before giving up.
        best: Vec<f64>,
    },
    #[error("invalid instance: {0}")]
    BadInstance(String),
}

/// Overdetermined full-rank least squares instance `min_x ||A x - b||_2`.
#[derive(Debug, Clone)]
pub struct LsInstance {
    a: Matrix,
    b: Vec<f64>,
}

impl LsInstance {
    pub fn new(a: Matrix, b: Vec<f64>) -> Result<Self, EstimatorError> {
        if a.rows() <= a.cols() {
            return Err(EstimatorError::BadInstance(format!(
                "need n > d, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.rows() != b.len() {
            return Err(EstimatorError::BadInstance(
                "A and b row counts differ".into(),
            ));
        }
        if !a.is_finite() || !b.iter().all(|x| x.is_finite()) {
            return Err(EstimatorError::BadInstance("non-finite entries".into()));
        }
        qr_reduced(&a)?; // full-rank check
        Ok(LsInstance { a, b })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

/// Low-rank approximation instance: matrix plus target rank `1 <= r < rank(A)`.
#[derive(Debug, Clone)]
pub struct LowRankInstance {
    a: Matrix,
    r: usize,
    tail_frob: f64,
}

impl LowRankInstance {
    pub fn new(a: Matrix, r: usize) -> Result<Self, EstimatorError> {
        if !a.is_finite() {
            return Err(EstimatorError::BadInstance("non-finite entries".into()));
        }
        // Validates 1 <= r < rank(A) and fixes the optimal-error denominator
        // once per instance.
        let (_, tail_frob) = crate::linalg::best_rank_r(&a, r)?;
        Ok(LowRankInstance { a, r, tail_frob })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `||A - A_r||_F`, the truncated-SVD optimum.
    pub fn tail_frob(&self) -> f64 {
        self.tail_frob
    }
}

/// lp regression instance `min_x ||A x - b||_p` with finite `p >= 1`.
#[derive(Debug, Clone)]
pub struct LpInstance {
    a: Matrix,
    b: Vec<f64>,
    p: f64,
}

impl LpInstance {
    pub fn new(a: Matrix, b: Vec<f64>, p: f64) -> Result<Self, EstimatorError> {
        if a.rows() <= a.cols() {
            return Err(EstimatorError::BadInstance(format!(
                "need n > d, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if a.rows() != b.len() {
            return Err(EstimatorError::BadInstance(
                "A and b row counts differ".into(),
            ));
        }
        if !p.is_finite() || p < 1.0 {
            return Err(LinalgError::BadExponent(p).into());
        }
        qr_reduced(&a)?;
        Ok(LpInstance { a, b, p })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}
