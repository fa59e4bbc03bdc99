//! Deterministic problem-instance generators used by the presets.

use crate::estimators::{LowRankInstance, LpInstance, LsInstance};
use crate::linalg::{norm2, qr_reduced, Matrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// The 2x1 toy regression problem: A = (1,0)^T, b = (0,1)^T, whose optimal
/// residual is exactly 1.
pub fn toy_ls() -> LsInstance {
    LsInstance::new(Matrix::column(&[1.0, 0.0]), vec![0.0, 1.0]).expect("valid toy instance")
}

/// diag(1, tau) with target rank 1.
pub fn diag_two(tau: f64) -> LowRankInstance {
    LowRankInstance::new(Matrix::diag(&[1.0, tau]), 1).expect("valid diagonal instance")
}

/// diag(1, tau, ..., tau) of size 30 with target rank 1.
pub fn diag_spiked_30(tau: f64) -> LowRankInstance {
    let mut entries = vec![tau; 30];
    entries[0] = 1.0;
    LowRankInstance::new(Matrix::diag(&entries), 1).expect("valid diagonal instance")
}

/// Haar-distributed n x d matrix with orthonormal columns (QR of a Gaussian
/// matrix with the positive-diagonal convention).
fn haar_orthonormal(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let g = Matrix::from_fn(n, d, |_, _| StandardNormal.sample(rng));
    let (q, _) = qr_reduced(&g).expect("Gaussian matrix is a.s. full rank");
    q
}

/// Fixed-budget regression instance: 1024 x 64 with geometrically decaying
/// singular values from 1 down to 0.12, uniformly random orthogonal factors,
/// standard-normal coefficients, and a residual orthogonal to range(A) with
/// norm `0.2 ||A x_star|| / sqrt(1024)`.
pub fn fixed_budget_ls(seed: u64) -> LsInstance {
    let (n, d) = (1024usize, 64usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_orthonormal(n, d, &mut rng);
    let v = haar_orthonormal(d, d, &mut rng);
    let sigma: Vec<f64> = (0..d)
        .map(|j| 0.12f64.powf(j as f64 / (d - 1) as f64))
        .collect();
    let us = Matrix::from_fn(n, d, |i, j| u.get(i, j) * sigma[j]);
    let a = us.matmul(&v.transpose());

    let x_star: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    let ax = a.matvec(&x_star);

    // Residual direction orthogonal to range(A) = range(U).
    let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let coeffs = u.transpose_matvec(&g);
    let back = u.matvec(&coeffs);
    let mut e: Vec<f64> = g.iter().zip(&back).map(|(gi, bi)| gi - bi).collect();
    let target = 0.2 * norm2(&ax) / (n as f64).sqrt();
    let scale = target / norm2(&e);
    for ei in e.iter_mut() {
        *ei *= scale;
    }

    let b: Vec<f64> = ax.iter().zip(&e).map(|(a, e)| a + e).collect();
    LsInstance::new(a, b).expect("valid fixed-budget instance")
}

/// Fixed-budget low-rank instance: 320 x 160 with unit leading singular
/// values up to the target rank 10 and an exponentially decaying tail
/// `sigma_{r+j} = 2^{-j}`, uniformly random orthogonal factors.
pub fn fixed_budget_low_rank(seed: u64) -> LowRankInstance {
    let (n, d, r) = (320usize, 160usize, 10usize);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = haar_orthonormal(n, d, &mut rng);
    let v = haar_orthonormal(d, d, &mut rng);
    let sigma: Vec<f64> = (0..d)
        .map(|j| {
            if j < r {
                1.0
            } else {
                2f64.powi(-((j - r) as i32 + 1))
            }
        })
        .collect();
    let us = Matrix::from_fn(n, d, |i, j| u.get(i, j) * sigma[j]);
    let a = us.matmul(&v.transpose());
    LowRankInstance::new(a, r).expect("valid fixed-budget instance")
}

/// Small lp regression instance (n = 6, d = 1) with column entries bounded
/// away from zero, so any sampling sketch keeps the column nonzero.
pub fn small_lp(seed: u64, p: f64) -> LpInstance {
    let n = 6usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let col: Vec<f64> = (0..n)
        .map(|_| {
            let mag = 0.5 + rng.gen::<f64>();
            if rng.gen::<f64>() < 0.5 {
                -mag
            } else {
                mag
            }
        })
        .collect();
    let x0: f64 = StandardNormal.sample(&mut rng);
    let b: Vec<f64> = col
        .iter()
        .map(|c| {
            let noise: f64 = StandardNormal.sample(&mut rng);
            c * x0 + noise
        })
        .collect();
    LpInstance::new(Matrix::column(&col), b, p).expect("valid lp instance")
}
