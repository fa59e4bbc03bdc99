//! Empirical isotropy and injectivity checks for a family.

use super::{RngSeed, SketchError, SketchFamily};
use crate::linalg::{gram_min_eig, lp_norm, Matrix};
use crate::montecarlo::hash64;
use rand_distr::{Distribution, StandardNormal};

/// Slack under alpha when testing the injectivity event: the strict/non-strict
/// distinction at the boundary is undecidable in floating point.
pub const INJECTIVITY_SLACK: f64 = 1e-12;

/// Number of random probe vectors for the p-isotropy variant.
const P_ISOTROPY_PROBES: usize = 100;

/// Monte Carlo isotropy check over `trials` independent draws.
///
/// For ordinary families, returns the maximum entrywise deviation of the
/// empirical mean of `Omega Omega^T` from the identity. For the p-isotropic
/// sampler, returns the worst relative error of the empirical mean of
/// `||Omega^T z||_p^p` against `||z||_p^p` over random probes z.
///
/// Requires `trials >= 1000` so the binomial noise floor is meaningful.
pub fn check_isotropy(
    family: &SketchFamily,
    trials: usize,
    seed: RngSeed,
) -> Result<f64, SketchError> {
    assert!(trials >= 1000, "check_isotropy needs at least 1000 trials");
    family.validate()?;
    let n = family.n();
    let p = family.isotropy_exponent();

    if matches!(family, SketchFamily::LpSampler { .. }) {
        let mut rng = RngSeed(hash64(seed.0, u64::MAX)).rng();
        let probes: Vec<Vec<f64>> = (0..P_ISOTROPY_PROBES)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let targets: Vec<f64> = probes
            .iter()
            .map(|z| lp_norm(z, p).expect("validated p").powf(p))
            .collect();
        let mut sums = vec![0.0f64; probes.len()];
        for i in 0..trials {
            let omega = family.draw(RngSeed(hash64(seed.0, i as u64)))?;
            for (s, z) in sums.iter_mut().zip(&probes) {
                let y = omega.transpose_matvec(z);
                *s += lp_norm(&y, p).expect("validated p").powf(p);
            }
        }
        let worst = sums
            .iter()
            .zip(&targets)
            .map(|(s, t)| (s / trials as f64 - t).abs() / t)
            .fold(0.0f64, f64::max);
        return Ok(worst);
    }

    let mut mean = Matrix::zeros(n, n);
    for i in 0..trials {
        let omega = family.draw(RngSeed(hash64(seed.0, i as u64)))?;
        mean = mean.add(&omega.matmul(&omega.transpose()));
    }
    Ok(mean.scale(1.0 / trials as f64).max_abs_dev_from_identity())
}

/// Fraction of draws on which the injectivity event fails on the subspace
/// spanned by the orthonormal columns of `u_basis`, i.e. on which
/// `gram_min_eig(U, Omega) < alpha - 1e-12`.
pub fn check_injectivity(
    family: &SketchFamily,
    u_basis: &Matrix,
    trials: usize,
    alpha: f64,
    seed: RngSeed,
) -> Result<f64, SketchError> {
    family.validate()?;
    let mut failures = 0usize;
    for i in 0..trials {
        let omega = family.draw(RngSeed(hash64(seed.0, i as u64)))?;
        let min_eig = gram_min_eig(u_basis, &omega)?;
        if min_eig < alpha - INJECTIVITY_SLACK {
            failures += 1;
        }
    }
    Ok(failures as f64 / trials as f64)
}
