//! Catalog of random sketch-matrix families.
//!
//! Each family is a named distribution over matrices `Omega` (n x k) that is
//! isotropic, `E[Omega Omega^T] = I_n` (p-isotropic for the sampling family),
//! together with whatever injectivity parameters the construction actually
//! guarantees. Sampling is a pure function of (parameters, seed).
//!
//! The concrete constructions:
//!
//! - `gaussian`: i.i.d. N(0, 1/k) entries; the near-isometric baseline.
//! - `identity_mix`: identity with probability 1-rho, otherwise one of the
//!   two rank-one matrices B+/B- that collapse a diagonal direction.
//! - `augmented_spike`: `[sqrt(1-eps) I_2  sqrt(eps) u]` with a two-point
//!   random column u; injective on all of R^2 with parameter 1-eps.
//! - `trace_spike`: square root of `alpha I_s + B * s(1-alpha)/q * e_J e_J^T`;
//!   concentrates the excess trace in one random coordinate.
//! - `expo_rank_one`: square root of `alpha I_2 + T u u^T` with u uniform on
//!   the circle and T exponential with mean 2(1-alpha).
//! - `sign_pair`: the single column (1, +/-1) with equal probability.
//! - `sparse_signed`: i.i.d. ternary entries +/-sqrt(2) w.p. 1/4 each and 0
//!   w.p. 1/2, scaled by 1/sqrt(k).
//! - `lp_sampler`: k uniformly sampled scaled standard-basis columns
//!   `(n/k)^{1/p} e_i`; p-isotropic by construction.

mod checks;
mod config;
mod families;

pub use checks::{check_injectivity, check_isotropy, INJECTIVITY_SLACK};
pub use config::{ConfigError, FamilyConfig};
pub use families::{
    draw_augmented_spike, draw_expo_rank_one, draw_gaussian, draw_identity_mix, draw_lp_sampler,
    draw_sign_pair, draw_sparse_signed, draw_trace_spike, MixtureBranch,
};

use crate::linalg::{LinalgError, Matrix};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Seed for one draw. Same seed plus same family gives a bit-identical matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub(crate) fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

/// Declared theoretical parameters of a family: injectivity holds on every
/// fixed s-dimensional subspace with constant `alpha` except on an event of
/// probability at most `rho`. `p` marks the norm for p-isotropic families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsiParams {
    pub s: usize,
    pub alpha: f64,
    pub rho: f64,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SketchError {
    #[error("bad family parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn bad(msg: impl Into<String>) -> SketchError {
    SketchError::BadParams(msg.into())
}

/// A named sketch distribution with its shape and parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchFamily {
    Gaussian { n: usize, k: usize },
    IdentityMix { rho: f64 },
    AugmentedSpike { epsilon: f64, loss: f64 },
    TraceSpike { s: usize, alpha: f64, q: f64 },
    ExpoRankOne { alpha: f64 },
    SignPair,
    SparseSigned { n: usize, k: usize },
    LpSampler { n: usize, k: usize, p: f64 },
}

impl SketchFamily {
    pub fn name(&self) -> &'static str {
        match self {
            SketchFamily::Gaussian { .. } => "gaussian",
            SketchFamily::IdentityMix { .. } => "identity_mix",
            SketchFamily::AugmentedSpike { .. } => "augmented_spike",
            SketchFamily::TraceSpike { .. } => "trace_spike",
            SketchFamily::ExpoRankOne { .. } => "expo_rank_one",
            SketchFamily::SignPair => "sign_pair",
            SketchFamily::SparseSigned { .. } => "sparse_signed",
            SketchFamily::LpSampler { .. } => "lp_sampler",
        }
    }

    /// Ambient dimension n (the sketch maps R^n to R^k via `Omega^T`).
    pub fn n(&self) -> usize {
        match *self {
            SketchFamily::Gaussian { n, .. } => n,
            SketchFamily::IdentityMix { .. } => 2,
            SketchFamily::AugmentedSpike { .. } => 2,
            SketchFamily::TraceSpike { s, .. } => s,
            SketchFamily::ExpoRankOne { .. } => 2,
            SketchFamily::SignPair => 2,
            SketchFamily::SparseSigned { n, .. } => n,
            SketchFamily::LpSampler { n, .. } => n,
        }
    }

    /// Number of sketch columns k.
    pub fn k(&self) -> usize {
        match *self {
            SketchFamily::Gaussian { k, .. } => k,
            SketchFamily::IdentityMix { .. } => 2,
            SketchFamily::AugmentedSpike { .. } => 3,
            SketchFamily::TraceSpike { s, .. } => s,
            SketchFamily::ExpoRankOne { .. } => 2,
            SketchFamily::SignPair => 1,
            SketchFamily::SparseSigned { k, .. } => k,
            SketchFamily::LpSampler { k, .. } => k,
        }
    }

    /// Validate the family-specific parameter ranges.
    pub fn validate(&self) -> Result<(), SketchError> {
        let finite = |v: f64, name: &str| -> Result<(), SketchError> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(bad(format!("{name} must be finite, got {v}")))
            }
        };
        match *self {
            SketchFamily::Gaussian { n, k } | SketchFamily::SparseSigned { n, k } => {
                if n < 1 || k < 1 {
                    return Err(bad("n and k must be >= 1"));
                }
            }
            SketchFamily::IdentityMix { rho } => {
                finite(rho, "rho")?;
                if !(0.0..1.0).contains(&rho) {
                    return Err(bad(format!("rho = {rho} not in [0, 1)")));
                }
            }
            SketchFamily::AugmentedSpike { epsilon, loss } => {
                finite(epsilon, "epsilon")?;
                finite(loss, "L")?;
                if !(epsilon > 0.0 && epsilon < 1.0) {
                    return Err(bad(format!("epsilon = {epsilon} not in (0, 1)")));
                }
                if loss < 1.0 {
                    return Err(bad(format!("L = {loss} must be >= 1")));
                }
            }
            SketchFamily::TraceSpike { s, alpha, q } => {
                finite(alpha, "alpha")?;
                finite(q, "q")?;
                if s < 1 {
                    return Err(bad("s must be >= 1"));
                }
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(bad(format!("alpha = {alpha} not in (0, 1]")));
                }
                if !(q > 0.0 && q < 1.0) {
                    return Err(bad(format!("q = {q} not in (0, 1)")));
                }
            }
            SketchFamily::ExpoRankOne { alpha } => {
                finite(alpha, "alpha")?;
                if !(alpha > 0.0 && alpha <= 1.0) {
                    return Err(bad(format!("alpha = {alpha} not in (0, 1]")));
                }
            }
            SketchFamily::SignPair => {}
            SketchFamily::LpSampler { n, k, p } => {
                finite(p, "p")?;
                if n < 1 || k < 1 {
                    return Err(bad("n and k must be >= 1"));
                }
                if p < 1.0 {
                    return Err(bad(format!("p = {p} must be >= 1")));
                }
            }
        }
        Ok(())
    }

    /// Declared (s, alpha, rho) injectivity parameters, where the
    /// construction guarantees them. Baseline families (`gaussian`,
    /// `sparse_signed`) and the sampler carry no declared injectivity; their
    /// alpha must be calibrated empirically.
    pub fn declared(&self) -> Option<OsiParams> {
        match *self {
            SketchFamily::IdentityMix { rho } => Some(OsiParams {
                s: 1,
                alpha: 1.0,
                rho,
                p: None,
            }),
            SketchFamily::AugmentedSpike { epsilon, .. } => Some(OsiParams {
                s: 1,
                alpha: 1.0 - epsilon,
                rho: 0.0,
                p: None,
            }),
            SketchFamily::TraceSpike { s, alpha, .. } => Some(OsiParams {
                s,
                alpha,
                rho: 0.0,
                p: None,
            }),
            SketchFamily::ExpoRankOne { alpha } => Some(OsiParams {
                s: 1,
                alpha,
                rho: 0.0,
                p: None,
            }),
            SketchFamily::SignPair => Some(OsiParams {
                s: 1,
                alpha: 1.0,
                rho: 0.5,
                p: None,
            }),
            _ => None,
        }
    }

    /// Norm exponent governing the isotropy property: `p` for the sampler,
    /// 2 (ordinary isotropy) for everything else.
    pub fn isotropy_exponent(&self) -> f64 {
        match *self {
            SketchFamily::LpSampler { p, .. } => p,
            _ => 2.0,
        }
    }

    /// Draw one sketch matrix. Pure in (self, seed).
    pub fn draw(&self, seed: RngSeed) -> Result<Matrix, SketchError> {
        Ok(self.draw_with_branch(seed)?.0)
    }

    /// Draw one sketch matrix together with the mixture branch label for
    /// finite-mixture families (None for continuous families).
    pub fn draw_with_branch(&self, seed: RngSeed) -> Result<(Matrix, Option<u32>), SketchError> {
        self.validate()?;
        Ok(families::draw_validated(self, seed))
    }

    /// For finite mixtures: the exact list of (probability, matrix) branches,
    /// enumerated analytically. Continuous families return None.
    pub fn branches(&self) -> Option<Vec<MixtureBranch>> {
        families::branches(self)
    }

    /// Exact isotropy defect computed by branch enumeration (finite
    /// mixtures) or column-expectation algebra (`lp_sampler`): the maximum
    /// entrywise deviation of `E[Omega Omega^T]` from the identity, or of the
    /// p-moment from the target for the sampler. None for continuous
    /// families, which have no finite enumeration.
    pub fn analytic_isotropy_defect(&self) -> Option<f64> {
        families::analytic_isotropy_defect(self)
    }
}
