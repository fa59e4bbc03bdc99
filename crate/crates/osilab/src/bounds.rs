//! Closed-form evaluation of every guarantee the sketch families satisfy.
//!
//! Each operation returns either explicit embedding parameters or a
//! [`Guarantee`]: a bound on the error ratio together with the probability at
//! which it must hold. The `squared` flag records whether the factor bounds
//! the squared ratio (the l2 least-squares and Frobenius low-rank bounds) or
//! the plain ratio (the lp bounds); mixing the two silently is the most
//! likely way to misuse this module.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BoundsError {
    #[error("tau = {tau} must lie in (0, 1 - rho) = (0, {limit})")]
    BadTau { tau: f64, limit: f64 },
    #[error("bad bound parameters: {0}")]
    BadParams(String),
}

fn bad(msg: impl Into<String>) -> BoundsError {
    BoundsError::BadParams(msg.into())
}

fn require_finite(v: f64, name: &str) -> Result<(), BoundsError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite, got {v}")))
    }
}

/// Two-sided subspace embedding parameters: on every fixed s-dimensional
/// subspace, `alpha ||x||^2 <= ||Omega^T x||^2 <= beta ||x||^2` holds except
/// with probability rho.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OseParams {
    pub s: usize,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
}

/// A guarantee on the sketched-estimator error ratio: `factor` bounds the
/// ratio (squared ratio when `squared`) with probability at least
/// `success_prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Guarantee {
    pub factor: f64,
    pub success_prob: f64,
    pub squared: bool,
}

impl Guarantee {
    fn validated(self) -> Result<Self, BoundsError> {
        if !(self.factor.is_finite() && self.factor >= 1.0) {
            return Err(bad(format!(
                "factor {} must be finite and >= 1",
                self.factor
            )));
        }
        if !(self.success_prob > 0.0 && self.success_prob <= 1.0) {
            return Err(bad(format!(
                "success probability {} not in (0, 1]",
                self.success_prob
            )));
        }
        Ok(self)
    }
}

/// The weak embedding implied by an (s, alpha, rho) injection: for any
/// `0 < tau < 1 - rho`, a Markov bound on the excess trace of the subspace
/// Gram matrix yields
/// `beta = alpha + s(1 - alpha + alpha rho)/tau` at failure `rho + tau`.
pub fn implied_ose(s: usize, alpha: f64, rho: f64, tau: f64) -> Result<OseParams, BoundsError> {
    require_finite(alpha, "alpha")?;
    require_finite(rho, "rho")?;
    require_finite(tau, "tau")?;
    if s < 1 {
        return Err(bad("s must be >= 1"));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(bad(format!("alpha = {alpha} not in (0, 1]")));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(bad(format!("rho = {rho} not in [0, 1)")));
    }
    if !(tau > 0.0 && tau < 1.0 - rho) {
        return Err(BoundsError::BadTau {
            tau,
            limit: 1.0 - rho,
        });
    }
    let beta = alpha + s as f64 * (1.0 - alpha + alpha * rho) / tau;
    Ok(OseParams {
        s,
        alpha,
        beta,
        rho: rho + tau,
    })
}

/// The classical two-sided embedding factor `sqrt(beta / alpha)` on the
/// unsquared error ratio.
pub fn ose_relative_factor(alpha: f64, beta: f64) -> Result<f64, BoundsError> {
    require_finite(alpha, "alpha")?;
    require_finite(beta, "beta")?;
    if !(alpha > 0.0 && beta >= alpha) {
        return Err(bad(format!(
            "need 0 < alpha <= beta, got ({alpha}, {beta})"
        )));
    }
    Ok((beta / alpha).sqrt())
}

/// Least-squares rescue bound: if the sketch is isotropic and injective with
/// constant alpha on span(range(A), b) except with probability delta, then
/// for every eta in (0,1),
/// `||A x~ - b||^2 <= (1 + (1 - alpha + alpha delta)/(4 alpha eta)) ||A x* - b||^2`
/// with probability at least `1 - delta - eta`.
pub fn ls_relative_bound(alpha: f64, delta: f64, eta: f64) -> Result<Guarantee, BoundsError> {
    require_finite(alpha, "alpha")?;
    require_finite(delta, "delta")?;
    require_finite(eta, "eta")?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(bad(format!("alpha = {alpha} not in (0, 1]")));
    }
    if delta < 0.0 {
        return Err(bad(format!("delta = {delta} must be >= 0")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(bad(format!("eta = {eta} not in (0, 1)")));
    }
    if delta + eta >= 1.0 {
        return Err(bad(format!("delta + eta = {} must be < 1", delta + eta)));
    }
    Guarantee {
        factor: 1.0 + (1.0 - alpha + alpha * delta) / (4.0 * alpha * eta),
        success_prob: 1.0 - delta - eta,
        squared: true,
    }
    .validated()
}

/// Low-rank rescue bound: with an (r+1, alpha, rho) injection and rank-q
/// input, a union bound over the q - r augmented tail subspaces gives the
/// least-squares bound with `delta = (q - r) rho`.
pub fn rsvd_relative_bound(
    alpha: f64,
    rho: f64,
    q_minus_r: usize,
    eta: f64,
) -> Result<Guarantee, BoundsError> {
    require_finite(rho, "rho")?;
    if rho < 0.0 {
        return Err(bad(format!("rho = {rho} must be >= 0")));
    }
    let delta = q_minus_r as f64 * rho;
    if delta >= 1.0 {
        return Err(bad(format!("(q - r) rho = {delta} must be < 1")));
    }
    ls_relative_bound(alpha, delta, eta)
}

/// Deterministic lp sketch-and-solve bound: injectivity alpha on range(A)
/// plus an upper bound beta on the sketched optimal residual give
/// `||A x~ - b||_p <= (1 + 2 (beta/alpha)^{1/p}) min ||A x - b||_p`.
pub fn lp_deterministic_bound(alpha: f64, beta: f64, p: f64) -> Result<Guarantee, BoundsError> {
    require_finite(alpha, "alpha")?;
    require_finite(beta, "beta")?;
    require_finite(p, "p")?;
    if alpha <= 0.0 || beta <= 0.0 {
        return Err(bad(format!(
            "alpha, beta must be positive, got ({alpha}, {beta})"
        )));
    }
    if p < 1.0 {
        return Err(bad(format!("p = {p} must be >= 1")));
    }
    Guarantee {
        factor: 1.0 + 2.0 * (beta / alpha).powf(1.0 / p),
        success_prob: 1.0,
        squared: false,
    }
    .validated()
}

/// Probabilistic lp bound: for an (r, alpha, rho) p-isotropic injection and
/// any t >= 1, Markov on the sketched residual p-moment gives factor
/// `1 + 2 (t/alpha)^{1/p}` with probability at least `1 - rho - 1/t`.
pub fn lp_probabilistic_bound(
    alpha: f64,
    rho: f64,
    p: f64,
    t: f64,
) -> Result<Guarantee, BoundsError> {
    require_finite(alpha, "alpha")?;
    require_finite(rho, "rho")?;
    require_finite(t, "t")?;
    require_finite(p, "p")?;
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(bad(format!("alpha = {alpha} not in (0, 1]")));
    }
    if rho < 0.0 {
        return Err(bad(format!("rho = {rho} must be >= 0")));
    }
    if t < 1.0 {
        return Err(bad(format!("t = {t} must be >= 1")));
    }
    if p < 1.0 {
        return Err(bad(format!("p = {p} must be >= 1")));
    }
    if rho + 1.0 / t >= 1.0 {
        return Err(bad(format!(
            "rho + 1/t = {} leaves no success probability",
            rho + 1.0 / t
        )));
    }
    Guarantee {
        factor: 1.0 + 2.0 * (t / alpha).powf(1.0 / p),
        success_prob: 1.0 - rho - 1.0 / t,
        squared: false,
    }
    .validated()
}

/// Convenience form of [`lp_probabilistic_bound`]: for a target failure
/// `delta` with `rho <= delta/2`, taking `t = 2/delta` gives factor
/// `1 + 2 (2/(alpha delta))^{1/p}` at success probability `1 - delta`.
pub fn lp_probabilistic_bound_delta(
    alpha: f64,
    rho: f64,
    p: f64,
    delta: f64,
) -> Result<Guarantee, BoundsError> {
    require_finite(delta, "delta")?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(bad(format!("delta = {delta} not in (0, 1)")));
    }
    if rho > delta / 2.0 {
        return Err(bad(format!(
            "rho = {rho} must be <= delta/2 = {}",
            delta / 2.0
        )));
    }
    let g = lp_probabilistic_bound(alpha, rho, p, 2.0 / delta)?;
    Guarantee {
        factor: g.factor,
        success_prob: 1.0 - delta,
        squared: false,
    }
    .validated()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implied_ose_examples() {
        // A perfect injection stays a perfect isometry whatever tau is.
        let o = implied_ose(3, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(o.beta, 1.0);
        assert_eq!(o.rho, 0.5);

        let o = implied_ose(3, 0.9, 0.05, 0.2).unwrap();
        assert!((o.beta - (0.9 + 3.0 * 0.145 / 0.2)).abs() < 1e-15);
        assert!((o.beta - 3.075).abs() < 1e-12);
        assert!((o.rho - 0.25).abs() < 1e-15);

        // beta - alpha = s * eps / tau when alpha = 1 - eps and rho = 0.
        let eps = 0.05;
        let o = implied_ose(2, 1.0 - eps, 0.0, 0.3).unwrap();
        assert!((o.beta - o.alpha - 2.0 * eps / 0.3).abs() < 1e-14);
    }

    #[test]
    fn implied_ose_rejects_bad_tau() {
        assert!(matches!(
            implied_ose(2, 0.9, 0.5, 0.5),
            Err(BoundsError::BadTau { .. })
        ));
        assert!(matches!(
            implied_ose(2, 0.9, 0.0, 0.0),
            Err(BoundsError::BadTau { .. })
        ));
    }

    #[test]
    fn ose_factor_examples() {
        assert_eq!(ose_relative_factor(1.0, 1.0).unwrap(), 1.0);
        assert_eq!(ose_relative_factor(0.5, 2.0).unwrap(), 2.0);
        let beta = implied_ose(3, 0.9, 0.05, 0.2).unwrap().beta;
        let f = ose_relative_factor(0.9, beta).unwrap();
        assert!((f - (3.075f64 / 0.9).sqrt()).abs() < 1e-12);
        assert!((f - 1.848).abs() < 1e-3);
        assert!(ose_relative_factor(0.5, 0.4).is_err());
    }

    #[test]
    fn ls_bound_examples() {
        let g = ls_relative_bound(1.0, 0.0, 0.3).unwrap();
        assert_eq!(g.factor, 1.0);
        assert!(g.squared);

        let g = ls_relative_bound(0.9, 0.0, 0.1).unwrap();
        assert!((g.factor - (1.0 + 0.1 / 0.36)).abs() < 1e-14);
        assert!((g.success_prob - 0.9).abs() < 1e-15);

        // alpha = 1 - eps, delta = 0: the 1 + O(eps/eta) regime.
        let eps = 0.02;
        let eta = 0.25;
        let g = ls_relative_bound(1.0 - eps, 0.0, eta).unwrap();
        assert!((g.factor - (1.0 + eps / (4.0 * (1.0 - eps) * eta))).abs() < 1e-14);
    }

    #[test]
    fn rsvd_bound_matches_ls_bound_at_zero_failure() {
        for qr in [1usize, 5, 150] {
            let a = rsvd_relative_bound(0.9, 0.0, qr, 0.1).unwrap();
            let b = ls_relative_bound(0.9, 0.0, 0.1).unwrap();
            assert_eq!(a, b);
        }
        let g = rsvd_relative_bound(0.9, 0.0, 7, 0.1).unwrap();
        assert!((g.factor - 1.2778).abs() < 1e-4);
    }

    #[test]
    fn lp_deterministic_examples() {
        assert_eq!(lp_deterministic_bound(0.7, 0.7, 3.0).unwrap().factor, 3.0);
        assert_eq!(lp_deterministic_bound(0.5, 2.0, 2.0).unwrap().factor, 5.0);
        assert_eq!(lp_deterministic_bound(0.5, 2.0, 1.0).unwrap().factor, 9.0);
        let g = lp_deterministic_bound(0.5, 2.0, 1.0).unwrap();
        assert_eq!(g.success_prob, 1.0);
        assert!(!g.squared);
    }

    #[test]
    fn lp_probabilistic_examples() {
        let g = lp_probabilistic_bound_delta(1.0, 0.0, 1.0, 0.5).unwrap();
        assert_eq!(g.factor, 9.0);
        assert_eq!(g.success_prob, 0.5);

        // t = 1 with rho = 0 leaves zero success probability.
        assert!(lp_probabilistic_bound(1.0, 0.0, 2.0, 1.0).is_err());

        let g = lp_probabilistic_bound(1.0, 0.1, 2.0, 4.0).unwrap();
        assert_eq!(g.factor, 5.0);
        assert!((g.success_prob - 0.65).abs() < 1e-15);

        // The delta form requires rho <= delta/2.
        assert!(lp_probabilistic_bound_delta(1.0, 0.4, 1.0, 0.5).is_err());
    }

    #[test]
    fn implied_ose_monotonicity_grid() {
        // beta decreases in tau, increases in s and rho.
        let taus = [0.1, 0.2, 0.4, 0.6];
        for w in taus.windows(2) {
            let lo = implied_ose(4, 0.8, 0.1, w[0]).unwrap().beta;
            let hi = implied_ose(4, 0.8, 0.1, w[1]).unwrap().beta;
            assert!(hi <= lo);
        }
        for s in 1..6usize {
            let a = implied_ose(s, 0.8, 0.1, 0.2).unwrap().beta;
            let b = implied_ose(s + 1, 0.8, 0.1, 0.2).unwrap().beta;
            assert!(b >= a);
        }
        let rhos = [0.0, 0.1, 0.2, 0.5];
        for w in rhos.windows(2) {
            let a = implied_ose(4, 0.8, w[0], 0.2).unwrap().beta;
            let b = implied_ose(4, 0.8, w[1], 0.2).unwrap().beta;
            assert!(b >= a);
        }
    }
}
