//! Property tests for the algebraic invariants every module must satisfy,
//! plus the seeded random-corpus checks for the dense kernels.

use osilab::bounds;
use osilab::estimators::{rangefinder_rsvd, sketch_and_solve_ls, LowRankInstance, LsInstance};
use osilab::linalg::{gram_min_eig, lstsq_exact, norm2, pinv, qr_reduced, svd, Matrix};
use osilab::montecarlo::hash64;
use osilab::sketch::{check_injectivity, RngSeed, SketchFamily};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

fn haar(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let (q, _) = qr_reduced(&gaussian_matrix(rows, cols, rng)).expect("a.s. full rank");
    q
}

// ---- core kernels over a random corpus -------------------------------------

#[test]
fn qr_and_lstsq_invariants_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let d = rng.gen_range(1..=6);
        let n = rng.gen_range(d..=12).max(d + 1);
        let a = gaussian_matrix(n, d, &mut rng);
        let Ok((q, r)) = qr_reduced(&a) else { continue };
        let recon_err = q.matmul(&r).sub(&a).frobenius_norm();
        assert!(
            recon_err <= 1e-10 * a.frobenius_norm().max(1.0),
            "QR reconstruction {recon_err}"
        );
        let ortho = q.transpose_matmul(&q).max_abs_dev_from_identity();
        assert!(ortho <= 1e-10, "Q orthonormality {ortho}");
        for j in 0..d {
            assert!(r.get(j, j) >= 0.0, "sign convention violated");
        }

        let b: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let (x, _) = lstsq_exact(&a, &b).unwrap();
        let mut resid = a.matvec(&x);
        for (ri, bi) in resid.iter_mut().zip(&b) {
            *ri -= bi;
        }
        // Residual orthogonal to range(A).
        let proj = a.transpose_matvec(&resid);
        assert!(
            norm2(&proj) <= 1e-8 * norm2(&b).max(1.0),
            "normal equations violated"
        );
    }
}

#[test]
fn svd_and_pinv_invariants_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=32);
        let d = rng.gen_range(1..=32);
        let mut a = gaussian_matrix(n, d, &mut rng);
        // Mix in rank-deficient cases.
        if trial % 5 == 0 && d >= 2 {
            for (i, c) in a.col(0).iter().enumerate() {
                a.set(i, d - 1, 2.0 * c);
            }
        }
        let f = svd(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        let scaled_u = Matrix::from_fn(n, f.u.cols(), |i, j| f.u.get(i, j) * f.singular_values[j]);
        let recon = scaled_u.matmul(&f.v.transpose());
        assert!(
            recon.sub(&a).frobenius_norm() <= 1e-10 * scale,
            "SVD reconstruction"
        );
        assert!(
            f.u.transpose_matmul(&f.u).max_abs_dev_from_identity() <= 1e-10,
            "U orthonormality"
        );
        assert!(
            f.v.transpose_matmul(&f.v).max_abs_dev_from_identity() <= 1e-10,
            "V orthonormality"
        );
        let mut sorted = f.singular_values.clone();
        sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
        assert_eq!(sorted, f.singular_values, "singular values not sorted");

        let p = pinv(&a).unwrap();
        let apa = a.matmul(&p).matmul(&a);
        assert!(apa.sub(&a).frobenius_norm() <= 1e-8 * scale, "A A+ A != A");
    }
}

#[test]
fn pinv_satisfies_all_four_penrose_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..=10);
        let d = rng.gen_range(1..=10);
        let a = gaussian_matrix(n, d, &mut rng);
        let p = pinv(&a).unwrap();
        let scale = p.frobenius_norm().max(1.0);
        assert!(a.matmul(&p).matmul(&a).sub(&a).frobenius_norm() <= 1e-8 * scale);
        assert!(p.matmul(&a).matmul(&p).sub(&p).frobenius_norm() <= 1e-8 * scale);
        let ap = a.matmul(&p);
        assert!(ap.transpose().sub(&ap).frobenius_norm() <= 1e-8 * scale);
        let pa = p.matmul(&a);
        assert!(pa.transpose().sub(&pa).frobenius_norm() <= 1e-8 * scale);
    }
}

#[test]
fn gram_min_eig_lower_bounds_every_probe() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=8);
        let s = rng.gen_range(1..=n);
        let k = rng.gen_range(1..=8);
        let u = haar(n, s, &mut rng);
        let omega = gaussian_matrix(n, k, &mut rng);
        let min_eig = gram_min_eig(&u, &omega).unwrap();
        // Random unit probe in range(U).
        let coeffs: Vec<f64> = (0..s).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut x = u.matvec(&coeffs);
        let nx = norm2(&x);
        if nx < 1e-12 {
            continue;
        }
        for xi in x.iter_mut() {
            *xi /= nx;
        }
        let probe = norm2(&omega.transpose_matvec(&x)).powi(2);
        assert!(
            min_eig <= probe + 1e-8,
            "min eigenvalue {min_eig} exceeds probe {probe}"
        );
    }
}

// ---- sketch families --------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Same (family, seed) must give a bit-identical draw.
    #[test]
    fn draws_deterministic(rho in 0.0..0.99f64, alpha in 0.01..=1.0f64, seed in any::<u64>()) {
        for family in [
            SketchFamily::IdentityMix { rho },
            SketchFamily::ExpoRankOne { alpha },
            SketchFamily::TraceSpike { s: 3, alpha, q: 0.4 },
            SketchFamily::Gaussian { n: 3, k: 2 },
        ] {
            let a = family.draw(RngSeed(seed)).unwrap();
            let b = family.draw(RngSeed(seed)).unwrap();
            prop_assert_eq!(a.data(), b.data());
        }
    }

    /// Finite mixtures average to the identity exactly, for any parameters.
    #[test]
    fn mixture_means_are_identity(
        rho in 0.0..0.99f64,
        epsilon in 0.01..0.99f64,
        loss in 1.0..8.0f64,
        s in 1usize..8,
        alpha in 0.05..=1.0f64,
        q in 0.01..0.99f64,
    ) {
        for family in [
            SketchFamily::IdentityMix { rho },
            SketchFamily::AugmentedSpike { epsilon, loss },
            SketchFamily::TraceSpike { s, alpha, q },
            SketchFamily::SignPair,
        ] {
            let defect = family.analytic_isotropy_defect().unwrap();
            prop_assert!(defect < 1e-12, "family {} defect {}", family.name(), defect);
        }
    }

    /// Branch probabilities are a distribution and match the draw labels.
    #[test]
    fn branch_probabilities_sum_to_one(
        rho in 0.0..0.99f64,
        epsilon in 0.01..0.99f64,
        loss in 1.0..8.0f64,
    ) {
        for family in [
            SketchFamily::IdentityMix { rho },
            SketchFamily::AugmentedSpike { epsilon, loss },
            SketchFamily::TraceSpike { s: 4, alpha: 0.5, q: 0.25 },
            SketchFamily::SignPair,
        ] {
            let branches = family.branches().unwrap();
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
            let (m, label) = family.draw_with_branch(RngSeed(7)).unwrap();
            let b = &branches[label.unwrap() as usize];
            prop_assert_eq!(b.label, label.unwrap());
            prop_assert_eq!(b.matrix.data(), m.data());
        }
    }
}

#[test]
fn zero_failure_families_never_fail_injectivity() {
    // Families declaring zero failure probability must hold injectivity on
    // every subspace: 20 random subspaces, 500 draws each.
    let families = [
        SketchFamily::AugmentedSpike {
            epsilon: 0.1,
            loss: 2.0,
        },
        SketchFamily::TraceSpike {
            s: 4,
            alpha: 0.5,
            q: 0.25,
        },
        SketchFamily::ExpoRankOne { alpha: 0.5 },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for family in families {
        let declared = family.declared().unwrap();
        assert_eq!(declared.rho, 0.0);
        let n = family.n();
        for sub in 0..20 {
            let s = rng.gen_range(1..=n);
            let u = haar(n, s, &mut rng);
            let fail = check_injectivity(
                &family,
                &u,
                500,
                declared.alpha,
                RngSeed(hash64(6, sub as u64)),
            )
            .unwrap();
            assert_eq!(fail, 0.0, "family {} failed injectivity", family.name());
        }
    }
}

#[test]
fn mixture_branch_frequencies_match_probabilities() {
    let families = [
        SketchFamily::IdentityMix { rho: 0.3 },
        SketchFamily::AugmentedSpike {
            epsilon: 0.1,
            loss: 2.0,
        },
        SketchFamily::TraceSpike {
            s: 4,
            alpha: 0.5,
            q: 0.25,
        },
        SketchFamily::SignPair,
    ];
    let trials = 20_000usize;
    for family in families {
        let branches = family.branches().unwrap();
        let mut counts = vec![0usize; branches.len()];
        for i in 0..trials {
            let (_, label) = family
                .draw_with_branch(RngSeed(hash64(8, i as u64)))
                .unwrap();
            counts[label.unwrap() as usize] += 1;
        }
        for (b, &c) in branches.iter().zip(&counts) {
            let freq = c as f64 / trials as f64;
            let se = (b.probability * (1.0 - b.probability) / trials as f64).sqrt();
            assert!(
                (freq - b.probability).abs() <= 3.0 * se + 1e-9,
                "family {} branch {}: freq {freq} vs prob {}",
                family.name(),
                b.label,
                b.probability
            );
        }
    }
}

// ---- bounds -----------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    /// Every guarantee has factor >= 1 and a success probability in (0, 1].
    #[test]
    fn guarantees_are_well_formed(
        s in 1usize..64,
        alpha in 0.01..=1.0f64,
        rho in 0.0..0.5f64,
        tau in 0.01..0.49f64,
        eta in 0.01..0.49f64,
        delta in 0.0..0.5f64,
        beta_over_alpha in 1.0..100.0f64,
        p in 1.0..4.0f64,
        t in 1.5..50.0f64,
    ) {
        let ose = bounds::implied_ose(s, alpha, rho, tau).unwrap();
        prop_assert!(ose.beta >= ose.alpha);
        prop_assert!(ose.rho < 1.0);
        let f = bounds::ose_relative_factor(ose.alpha, ose.beta).unwrap();
        prop_assert!(f >= 1.0);

        let g = bounds::ls_relative_bound(alpha, delta, eta).unwrap();
        prop_assert!(g.factor >= 1.0 && g.success_prob > 0.0 && g.success_prob <= 1.0);
        prop_assert!(g.squared);

        let g2 = bounds::rsvd_relative_bound(alpha, 0.0, s, eta).unwrap();
        prop_assert_eq!(g2, bounds::ls_relative_bound(alpha, 0.0, eta).unwrap());

        let g3 = bounds::lp_deterministic_bound(alpha, alpha * beta_over_alpha, p).unwrap();
        prop_assert!(g3.factor >= 3.0 - 1e-12 && !g3.squared);

        if rho + 1.0 / t < 1.0 {
            let g4 = bounds::lp_probabilistic_bound(alpha, rho, p, t).unwrap();
            prop_assert!(g4.factor >= 1.0 && g4.success_prob > 0.0);
        }
    }
}

// ---- estimators ---------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// A scaled rotation (Omega Omega^T proportional to I) leaves the
    /// least-squares minimizer unchanged, so the ratio is exactly 1.
    #[test]
    fn scaled_orthogonal_sketch_preserves_the_solution(
        angle in 0.0..std::f64::consts::TAU,
        scale in 0.1..10.0f64,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 2 + (seed % 5) as usize;
        let a = gaussian_matrix(n, 1, &mut rng);
        let b: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let Ok(inst) = LsInstance::new(a, b) else { return Ok(()) };

        // Rotation in the first two coordinates, scaled.
        let mut omega = Matrix::identity(n);
        omega.set(0, 0, angle.cos());
        omega.set(0, 1, -angle.sin());
        omega.set(1, 0, angle.sin());
        omega.set(1, 1, angle.cos());
        let omega = omega.scale(scale);
        let out = sketch_and_solve_ls(&inst, &omega).unwrap();
        if let Some(ratio) = out.ratio {
            prop_assert!((ratio - 1.0).abs() < 1e-8, "ratio {}", ratio);
        }
    }

    /// With sketch width at most the target rank, the rangefinder cannot
    /// beat the truncated SVD.
    #[test]
    fn narrow_rangefinder_never_beats_truncation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(3..=8);
        let d = rng.gen_range(3..=8);
        let a = gaussian_matrix(n, d, &mut rng);
        let max_r = n.min(d) - 1;
        let r = rng.gen_range(1..=max_r);
        let k = rng.gen_range(1..=r);
        let inst = LowRankInstance::new(a, r).unwrap();
        let omega = gaussian_matrix(d, k, &mut rng);
        let out = rangefinder_rsvd(&inst, &omega).unwrap();
        prop_assert!(out.ratio >= 1.0 - 1e-10, "ratio {}", out.ratio);
    }
}

#[test]
fn rangefinder_obeys_the_two_sided_split() {
    // ||A - A~||_F^2 <= ||S2||_F^2 + ||S2 O2 O1^+||_F^2 with both sides from
    // independent computations.
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(4..=10);
        let d = rng.gen_range(3..=8).min(n);
        let a = gaussian_matrix(n, d, &mut rng);
        let max_r = n.min(d) - 1;
        let r = rng.gen_range(1..=max_r);
        let k = rng.gen_range(r..=d);
        let inst = LowRankInstance::new(a, r).unwrap();
        let omega = gaussian_matrix(d, k, &mut rng);
        match osilab::montecarlo::deflation_identity_check(&inst, &omega) {
            Ok(disc) => {
                let tail_sq = inst.tail_frob().powi(2);
                assert!(
                    disc <= 1e-8 * tail_sq,
                    "discrepancy {disc} vs tail^2 {tail_sq}"
                );
                checked += 1;
            }
            Err(_) => continue, // rank-deficient Omega_1 draw
        }
    }
}
