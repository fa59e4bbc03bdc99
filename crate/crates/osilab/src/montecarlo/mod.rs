//! Seeded Monte Carlo trial harness.
//!
//! Ties families, estimators, and bounds together: presets run N independent
//! trials, record error ratios and event flags, and issue a verdict on each
//! probability claim. Trials are embarrassingly parallel; per-trial seeds are
//! derived deterministically from the master seed, so results are
//! bit-identical regardless of thread count.

pub mod figures;
pub(crate) mod instances;
pub mod presets;

pub use figures::{FigureData, FigurePreset, HistogramSeries, MethodSummary};
pub use presets::{CheckReport, PresetReport, TheoremPreset};

use crate::bounds::Guarantee;
use crate::estimators::{rangefinder_rsvd, EstimatorError, LowRankInstance};
use crate::linalg::{pinv, svd, Matrix};
use rayon::prelude::*;
use std::collections::BTreeMap;
use thiserror::Error;

/// SplitMix64 finalizer; the published mixing function behind all per-trial
/// seed derivation.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed derivation: `hash64(master_seed, i)` feeds trial i.
pub fn hash64(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

/// Verdict slack: a claim is flagged only when the empirical rate exceeds the
/// allowance by more than three binomial standard errors.
pub const VERDICT_SIGMAS: f64 = 3.0;

/// One trial of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub ratio: f64,
    pub injectivity_held: bool,
    /// Mixture branch drawn, for finite-mixture families.
    pub branch_label: Option<u32>,
    /// Named per-trial statistics (e.g. the sketched residual moment).
    pub aux: BTreeMap<&'static str, f64>,
}

/// Run `trials` independent trials with deterministically derived seeds.
/// The trial closure must be pure in its arguments.
pub fn run_trials<F>(trials: usize, master_seed: u64, trial: F) -> Vec<TrialRecord>
where
    F: Fn(usize, u64) -> TrialRecord + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(i, hash64(master_seed, i as u64)))
        .collect()
}

/// Fallible variant of [`run_trials`] for presets whose estimators have real
/// error paths; the first error aborts the run.
pub fn try_run_trials<F>(
    trials: usize,
    master_seed: u64,
    trial: F,
) -> Result<Vec<TrialRecord>, MonteCarloError>
where
    F: Fn(usize, u64) -> Result<TrialRecord, MonteCarloError> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| trial(i, hash64(master_seed, i as u64)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The event must occur with probability at least `claimed`.
    AtLeast,
    /// The event must occur with probability at most `claimed`.
    AtMost,
    /// The event must occur with probability exactly `claimed`.
    Equals,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AtLeast => "at_least",
            Direction::AtMost => "at_most",
            Direction::Equals => "equals",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violated,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Consistent => "consistent",
            Verdict::Violated => "violated",
        }
    }
}

/// Comparison of one probability claim against trial data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// The closed-form guarantee behind the claim, when there is one.
    pub bound: Option<Guarantee>,
    /// Claimed probability of the event.
    pub claimed: f64,
    pub direction: Direction,
    /// Raw empirical frequency of the event.
    pub empirical: f64,
    /// How far the data overshoots the allowance (direction-adjusted).
    pub empirical_violation_rate: f64,
    pub allowed_failure: f64,
    pub mc_std_error: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MonteCarloError {
    #[error("need at least {needed} trials, got {got}")]
    TooFewTrials { needed: usize, got: usize },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    #[error(transparent)]
    Linalg(#[from] crate::linalg::LinalgError),
    #[error(transparent)]
    Sketch(#[from] crate::sketch::SketchError),
}

/// Check one probability claim over a set of trials.
///
/// The binomial standard error is `sqrt(p(1-p)/N)`; the verdict is violated
/// exactly when the direction-adjusted violation rate exceeds the allowed
/// failure by more than [`VERDICT_SIGMAS`] standard errors.
pub fn verify_probability<F>(
    records: &[TrialRecord],
    predicate: F,
    claimed_prob: f64,
    direction: Direction,
) -> Result<BoundReport, MonteCarloError>
where
    F: Fn(&TrialRecord) -> bool,
{
    if records.len() < 1000 {
        return Err(MonteCarloError::TooFewTrials {
            needed: 1000,
            got: records.len(),
        });
    }
    let n = records.len() as f64;
    let hits = records.iter().filter(|r| predicate(r)).count() as f64;
    let p_hat = hits / n;
    let std_error = (p_hat * (1.0 - p_hat) / n).sqrt();

    let (violation, allowed) = match direction {
        Direction::AtLeast => (1.0 - p_hat, 1.0 - claimed_prob),
        Direction::AtMost => (p_hat, claimed_prob),
        Direction::Equals => ((p_hat - claimed_prob).abs(), 0.0),
    };
    let verdict = if violation > allowed + VERDICT_SIGMAS * std_error {
        Verdict::Violated
    } else {
        Verdict::Consistent
    };
    Ok(BoundReport {
        bound: None,
        claimed: claimed_prob,
        direction,
        empirical: p_hat,
        empirical_violation_rate: violation,
        allowed_failure: allowed,
        mc_std_error: std_error,
        verdict,
    })
}

/// Specialization of [`verify_probability`] to the low-rank rescue bound on
/// squared Frobenius ratios: checks that `ratio^2 <= factor` fails at rate at
/// most `(q-r) rho + eta`.
pub fn verify_rsvd_bound(
    records: &[TrialRecord],
    alpha: f64,
    rho: f64,
    q_minus_r: usize,
    eta: f64,
) -> Result<BoundReport, MonteCarloError> {
    let guarantee = crate::bounds::rsvd_relative_bound(alpha, rho, q_minus_r, eta)
        .map_err(|e| EstimatorError::BadInstance(e.to_string()))?;
    let mut report = verify_probability(
        records,
        |r| r.ratio * r.ratio > guarantee.factor,
        1.0 - guarantee.success_prob,
        Direction::AtMost,
    )?;
    report.bound = Some(guarantee);
    Ok(report)
}

/// Independent two-sided computation of the rangefinder error split.
///
/// The left side is `||A - A~||_F^2` from the estimator path (pseudoinverse
/// of A Omega); the right side is `||S2||_F^2 + ||S2 O2 O1^+||_F^2` from the
/// SVD partition at rank r. Returns `max(0, lhs - rhs)`, which must vanish
/// up to roundoff because the split upper-bounds the projection error.
pub fn deflation_identity_check(
    inst: &LowRankInstance,
    omega: &Matrix,
) -> Result<f64, MonteCarloError> {
    let f = svd(inst.a())?;
    let q = f.rank(inst.a().rows(), inst.a().cols());
    let r = inst.r();
    let d = inst.a().cols();

    let v1 = Matrix::from_fn(d, r, |i, j| f.v.get(i, j));
    let omega_1 = v1.transpose_matmul(omega); // r x k
    let omega_1_svd = svd(&omega_1)?;
    let smin = omega_1_svd.singular_values.last().copied().unwrap_or(0.0);
    let smax = omega_1_svd.singular_values.first().copied().unwrap_or(0.0);
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(crate::linalg::LinalgError::RankDeficient.into());
    }

    let v2 = Matrix::from_fn(d, q - r, |i, j| f.v.get(i, r + j));
    let omega_2 = v2.transpose_matmul(omega); // (q-r) x k
    let cross = omega_2.matmul(&pinv(&omega_1)?); // (q-r) x r
    let tail_sq: f64 = f.singular_values[r..q].iter().map(|s| s * s).sum();
    let mut cross_sq = 0.0;
    for j in 0..(q - r) {
        let sigma = f.singular_values[r + j];
        let mut row_sq = 0.0;
        for c in 0..r {
            row_sq += cross.get(j, c) * cross.get(j, c);
        }
        cross_sq += sigma * sigma * row_sq;
    }
    let rhs = tail_sq + cross_sq;

    let out = rangefinder_rsvd(inst, omega)?;
    let lhs = inst.a().sub(&out.a_tilde).frobenius_norm().powi(2);
    Ok((lhs - rhs).max(0.0))
}

/// Render trial records as CSV with full-precision reals.
///
/// Columns: trial_index, seed, ratio, injectivity_held, branch_label, then
/// every aux key in sorted order. Reals carry 17 significant digits so
/// re-runs are byte-identical and lossless.
pub fn records_to_csv(records: &[TrialRecord]) -> String {
    let mut aux_keys: Vec<&'static str> = Vec::new();
    for r in records {
        for k in r.aux.keys() {
            if !aux_keys.contains(k) {
                aux_keys.push(k);
            }
        }
    }
    aux_keys.sort_unstable();

    let mut out = String::new();
    out.push_str("trial_index,seed,ratio,injectivity_held,branch_label");
    for k in &aux_keys {
        out.push(',');
        out.push_str(k);
    }
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}",
            r.index,
            r.seed,
            fmt_f64(r.ratio),
            u8::from(r.injectivity_held)
        ));
        match r.branch_label {
            Some(b) => out.push_str(&format!(",{b}")),
            None => out.push(','),
        }
        for k in &aux_keys {
            out.push(',');
            if let Some(v) = r.aux.get(k) {
                out.push_str(&fmt_f64(*v));
            }
        }
        out.push('\n');
    }
    out
}

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
