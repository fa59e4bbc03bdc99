//! Sampling routines for every family, plus exact branch enumeration for the
//! finite mixtures.

use super::{RngSeed, SketchError, SketchFamily};
use crate::linalg::{lp_norm, sym_sqrt_psd, Matrix};
use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

/// One branch of a finite mixture: its probability, the fixed matrix drawn
/// on that branch, and the label reported by `draw_with_branch`.
#[derive(Debug, Clone)]
pub struct MixtureBranch {
    pub probability: f64,
    pub matrix: Matrix,
    pub label: u32,
}

fn b_plus() -> Matrix {
    Matrix::from_rows(&[&[1.0, 0.0], &[1.0, 0.0]])
}

fn b_minus() -> Matrix {
    Matrix::from_rows(&[&[1.0, 0.0], &[-1.0, 0.0]])
}

fn spike_column(t: f64, plus: bool) -> Vec<f64> {
    if plus {
        let c = (t / 2.0).sqrt();
        vec![c, c]
    } else {
        let c = (t / (2.0 * (t - 1.0))).sqrt();
        vec![c, -c]
    }
}

fn augmented_spike_matrix(epsilon: f64, u: &[f64]) -> Matrix {
    let a = (1.0 - epsilon).sqrt();
    let e = epsilon.sqrt();
    Matrix::from_rows(&[&[a, 0.0, e * u[0]], &[0.0, a, e * u[1]]])
}

fn trace_spike_matrix(s: usize, alpha: f64, q: f64, heavy_coord: Option<usize>) -> Matrix {
    // S is diagonal, so the symmetric square root is too; route through the
    // generic PSD square root anyway so every family shares one code path.
    let mut diag = vec![alpha; s];
    if let Some(j) = heavy_coord {
        diag[j] += s as f64 * (1.0 - alpha) / q;
    }
    sym_sqrt_psd(&Matrix::diag(&diag)).expect("diagonal PSD matrix")
}

/// Dispatch; the family is already validated.
pub(super) fn draw_validated(family: &SketchFamily, seed: RngSeed) -> (Matrix, Option<u32>) {
    let mut rng = seed.rng();
    match *family {
        SketchFamily::Gaussian { n, k } => {
            let scale = 1.0 / (k as f64).sqrt();
            let m = Matrix::from_fn(n, k, |_, _| {
                let g: f64 = StandardNormal.sample(&mut rng);
                g * scale
            });
            (m, None)
        }
        SketchFamily::IdentityMix { rho } => {
            let u: f64 = rng.gen();
            if u < 1.0 - rho {
                (Matrix::identity(2), Some(0))
            } else if u < 1.0 - rho / 2.0 {
                (b_plus(), Some(1))
            } else {
                (b_minus(), Some(2))
            }
        }
        SketchFamily::AugmentedSpike { epsilon, loss } => {
            let t = 2.0 * loss / epsilon;
            let u: f64 = rng.gen();
            let plus = u < 1.0 / t;
            let col = spike_column(t, plus);
            (
                augmented_spike_matrix(epsilon, &col),
                Some(if plus { 0 } else { 1 }),
            )
        }
        SketchFamily::TraceSpike { s, alpha, q } => {
            let u: f64 = rng.gen();
            if u < q {
                let j = rng.gen_range(0..s);
                (trace_spike_matrix(s, alpha, q, Some(j)), Some(1 + j as u32))
            } else {
                (trace_spike_matrix(s, alpha, q, None), Some(0))
            }
        }
        SketchFamily::ExpoRankOne { alpha } => {
            let theta: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
            let u = [theta.cos(), theta.sin()];
            let t = if alpha < 1.0 {
                Exp::new(1.0 / (2.0 * (1.0 - alpha)))
                    .expect("positive rate")
                    .sample(&mut rng)
            } else {
                0.0
            };
            let gram = Matrix::from_fn(2, 2, |i, j| {
                let id = if i == j { alpha } else { 0.0 };
                id + t * u[i] * u[j]
            });
            (sym_sqrt_psd(&gram).expect("PSD by construction"), None)
        }
        SketchFamily::SignPair => {
            let plus = rng.gen::<f64>() < 0.5;
            let m = Matrix::column(&[1.0, if plus { 1.0 } else { -1.0 }]);
            (m, Some(if plus { 0 } else { 1 }))
        }
        SketchFamily::SparseSigned { n, k } => {
            let scale = 1.0 / (k as f64).sqrt();
            let root2 = 2f64.sqrt();
            let m = Matrix::from_fn(n, k, |_, _| {
                let u: f64 = rng.gen();
                if u < 0.25 {
                    root2 * scale
                } else if u < 0.5 {
                    -root2 * scale
                } else {
                    0.0
                }
            });
            (m, None)
        }
        SketchFamily::LpSampler { n, k, p } => {
            let scale = (n as f64 / k as f64).powf(1.0 / p);
            let mut m = Matrix::zeros(n, k);
            for j in 0..k {
                let i = rng.gen_range(0..n);
                m.set(i, j, scale);
            }
            (m, None)
        }
    }
}

pub(super) fn branches(family: &SketchFamily) -> Option<Vec<MixtureBranch>> {
    match *family {
        SketchFamily::IdentityMix { rho } => Some(vec![
            MixtureBranch {
                probability: 1.0 - rho,
                matrix: Matrix::identity(2),
                label: 0,
            },
            MixtureBranch {
                probability: rho / 2.0,
                matrix: b_plus(),
                label: 1,
            },
            MixtureBranch {
                probability: rho / 2.0,
                matrix: b_minus(),
                label: 2,
            },
        ]),
        SketchFamily::AugmentedSpike { epsilon, loss } => {
            let t = 2.0 * loss / epsilon;
            Some(vec![
                MixtureBranch {
                    probability: 1.0 / t,
                    matrix: augmented_spike_matrix(epsilon, &spike_column(t, true)),
                    label: 0,
                },
                MixtureBranch {
                    probability: 1.0 - 1.0 / t,
                    matrix: augmented_spike_matrix(epsilon, &spike_column(t, false)),
                    label: 1,
                },
            ])
        }
        SketchFamily::TraceSpike { s, alpha, q } => {
            let mut out = vec![MixtureBranch {
                probability: 1.0 - q,
                matrix: trace_spike_matrix(s, alpha, q, None),
                label: 0,
            }];
            for j in 0..s {
                out.push(MixtureBranch {
                    probability: q / s as f64,
                    matrix: trace_spike_matrix(s, alpha, q, Some(j)),
                    label: 1 + j as u32,
                });
            }
            Some(out)
        }
        SketchFamily::SignPair => Some(vec![
            MixtureBranch {
                probability: 0.5,
                matrix: Matrix::column(&[1.0, 1.0]),
                label: 0,
            },
            MixtureBranch {
                probability: 0.5,
                matrix: Matrix::column(&[1.0, -1.0]),
                label: 1,
            },
        ]),
        _ => None,
    }
}

pub(super) fn analytic_isotropy_defect(family: &SketchFamily) -> Option<f64> {
    if let Some(branches) = branches(family) {
        let n = family.n();
        let mut mean = Matrix::zeros(n, n);
        for b in &branches {
            mean = mean.add(&b.matrix.matmul(&b.matrix.transpose()).scale(b.probability));
        }
        return Some(mean.max_abs_dev_from_identity());
    }
    if let SketchFamily::LpSampler { n, k, p } = *family {
        // Column-wise enumeration: each column hits coordinate l with
        // probability 1/n and contributes (n/k)|z_l|^p to the p-th moment.
        let probes: Vec<Vec<f64>> = vec![
            (0..n).map(|i| (i + 1) as f64 / n as f64).collect(),
            (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect(),
            (0..n)
                .map(|i| if i % 2 == 0 { 1.0 } else { -0.5 })
                .collect(),
        ];
        let mut worst = 0.0f64;
        for z in &probes {
            let target = lp_norm(z, p).expect("validated p").powf(p);
            let per_column: f64 = (0..n)
                .map(|l| (n as f64 / k as f64) * z[l].abs().powf(p) / n as f64)
                .sum();
            let exact = k as f64 * per_column;
            worst = worst.max((exact - target).abs() / target);
        }
        return Some(worst);
    }
    None
}

#[allow(clippy::too_many_arguments)]
mod free_fns {
    //! Free-function forms of the draw operations.

    use super::*;

    fn draw(f: SketchFamily, seed: RngSeed) -> Result<Matrix, SketchError> {
        f.draw(seed)
    }

    /// i.i.d. N(0, 1/k) entries, so `E[Omega Omega^T] = I_n`.
    pub fn draw_gaussian(n: usize, k: usize, seed: RngSeed) -> Result<Matrix, SketchError> {
        draw(SketchFamily::Gaussian { n, k }, seed)
    }

    /// Identity with probability 1-rho, otherwise B+ or B- with probability
    /// rho/2 each.
    pub fn draw_identity_mix(rho: f64, seed: RngSeed) -> Result<Matrix, SketchError> {
        draw(SketchFamily::IdentityMix { rho }, seed)
    }

    /// `[sqrt(1-eps) I_2  sqrt(eps) u]` with u the two-point spike column.
    pub fn draw_augmented_spike(
        epsilon: f64,
        loss: f64,
        seed: RngSeed,
    ) -> Result<Matrix, SketchError> {
        draw(SketchFamily::AugmentedSpike { epsilon, loss }, seed)
    }

    /// Diagonal square root of `alpha I_s + B * s(1-alpha)/q * e_J e_J^T`.
    pub fn draw_trace_spike(
        s: usize,
        alpha: f64,
        q: f64,
        seed: RngSeed,
    ) -> Result<Matrix, SketchError> {
        draw(SketchFamily::TraceSpike { s, alpha, q }, seed)
    }

    /// Symmetric PSD square root of `alpha I_2 + T u u^T`.
    pub fn draw_expo_rank_one(alpha: f64, seed: RngSeed) -> Result<Matrix, SketchError> {
        draw(SketchFamily::ExpoRankOne { alpha }, seed)
    }

    /// The single column (1, 1) or (1, -1), equally likely.
    pub fn draw_sign_pair(seed: RngSeed) -> Result<Matrix, SketchError> {
        draw(SketchFamily::SignPair, seed)
    }

    /// i.i.d. ternary entries +/-sqrt(2) w.p. 1/4 each, 0 w.p. 1/2, scaled
    /// by 1/sqrt(k).
    pub fn draw_sparse_signed(n: usize, k: usize, seed: RngSeed) -> Result<Matrix, SketchError> {
        draw(SketchFamily::SparseSigned { n, k }, seed)
    }

    /// k scaled standard-basis columns `(n/k)^{1/p} e_i` with i.i.d. uniform
    /// indices.
    pub fn draw_lp_sampler(
        n: usize,
        k: usize,
        p: f64,
        seed: RngSeed,
    ) -> Result<Matrix, SketchError> {
        draw(SketchFamily::LpSampler { n, k, p }, seed)
    }
}

pub use free_fns::{
    draw_augmented_spike, draw_expo_rank_one, draw_gaussian, draw_identity_mix, draw_lp_sampler,
    draw_sign_pair, draw_sparse_signed, draw_trace_spike,
};
