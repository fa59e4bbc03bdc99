//! Figure-style presets: percentile summaries and ratio histograms that
//! reproduce the qualitative comparisons between near-isometric and
//! one-sided sketches.

use super::instances;
use super::{fmt_f64, hash64, MonteCarloError};
use crate::estimators::{rangefinder_rsvd, sketch_and_solve_ls, LowRankInstance, LsInstance};
use crate::sketch::{RngSeed, SketchFamily};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const LS_INSTANCE_STREAM: u64 = 0xF16_0000_0000_0001;
const RSVD_INSTANCE_STREAM: u64 = 0xF16_0000_0000_0002;
const BOOTSTRAP_STREAM: u64 = 0xF16_0000_0000_0003;
const METHOD_STREAM_BASE: u64 = 0xF16_0000_0000_1000;

const BOOTSTRAP_RESAMPLES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FigurePreset {
    /// Fixed-budget comparison: median and 10th/90th percentile of the
    /// regression and low-rank error ratios per sketch family.
    Fig1,
    /// Overlaid histogram of the regression ratio on the toy problem:
    /// Gaussian baseline vs. the exponential rank-one family.
    Fig2,
    /// Overlaid histogram of the rangefinder ratio on the 30x30 spiked
    /// diagonal: single Gaussian vector vs. the sparse signed vector.
    Fig3,
}

impl FigurePreset {
    pub const NAMES: [&'static str; 3] = ["fig1", "fig2", "fig3"];

    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3 => "fig3",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            FigurePreset::Fig1 => 100,
            FigurePreset::Fig2 | FigurePreset::Fig3 => 10_000,
        }
    }

    pub fn run(self, trials: usize, master_seed: u64) -> Result<FigureData, MonteCarloError> {
        assert!(trials >= 1, "need at least one trial");
        match self {
            FigurePreset::Fig1 => run_fig1(trials, master_seed),
            FigurePreset::Fig2 => run_fig2(trials, master_seed),
            FigurePreset::Fig3 => run_fig3(trials, master_seed),
        }
    }
}

/// Percentile summary of one (panel, method) ratio sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub panel: &'static str,
    pub method: &'static str,
    pub median: f64,
    pub p10: f64,
    pub p90: f64,
    /// Bootstrap standard error of the median; reported because percentile
    /// estimates from small trial counts are noisy.
    pub median_bootstrap_se: f64,
}

/// Histogram of one method's ratios over shared bin edges.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramSeries {
    pub method: &'static str,
    pub counts: Vec<usize>,
    pub p99: f64,
    /// Fraction of ratios strictly above 1.3 (the bimodality marker for the
    /// sparse single-vector family).
    pub mass_above_1_3: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FigureData {
    Summary {
        name: &'static str,
        summaries: Vec<MethodSummary>,
    },
    Histogram {
        name: &'static str,
        edges: Vec<f64>,
        series: Vec<HistogramSeries>,
    },
}

impl FigureData {
    pub fn name(&self) -> &'static str {
        match self {
            FigureData::Summary { name, .. } => name,
            FigureData::Histogram { name, .. } => name,
        }
    }

    /// Deterministic CSV rendering (17 significant digits, fixed ordering).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        match self {
            FigureData::Summary { summaries, .. } => {
                out.push_str("panel,method,median,p10,p90,median_bootstrap_se\n");
                for s in summaries {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        s.panel,
                        s.method,
                        fmt_f64(s.median),
                        fmt_f64(s.p10),
                        fmt_f64(s.p90),
                        fmt_f64(s.median_bootstrap_se)
                    ));
                }
            }
            FigureData::Histogram { edges, series, .. } => {
                out.push_str("bin_lo,bin_hi");
                for s in series {
                    out.push_str(&format!(",count_{}", s.method));
                }
                out.push('\n');
                for b in 0..edges.len() - 1 {
                    out.push_str(&format!("{},{}", fmt_f64(edges[b]), fmt_f64(edges[b + 1])));
                    for s in series {
                        out.push_str(&format!(",{}", s.counts[b]));
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Nearest-rank percentile of a sorted sample.
fn percentile(sorted: &[f64], pct: f64) -> f64 {
    let n = sorted.len();
    let rank = (pct / 100.0 * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn median_of(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    percentile(&v, 50.0)
}

fn bootstrap_median_se(ratios: &[f64], seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ratios.len();
    let medians: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let resample: Vec<f64> = (0..n).map(|_| ratios[rng.gen_range(0..n)]).collect();
            median_of(resample)
        })
        .collect();
    let mean = medians.iter().sum::<f64>() / medians.len() as f64;
    let var = medians.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (medians.len() - 1) as f64;
    var.sqrt()
}

fn ls_ratios(inst: &LsInstance, family: &SketchFamily, trials: usize, sub_seed: u64) -> Vec<f64> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let omega = family
                .draw(RngSeed(hash64(sub_seed, i as u64)))
                .expect("validated");
            let out = sketch_and_solve_ls(inst, &omega).expect("positive residual instance");
            out.ratio.expect("positive residual")
        })
        .collect()
}

fn rsvd_ratios(
    inst: &LowRankInstance,
    family: &SketchFamily,
    trials: usize,
    sub_seed: u64,
) -> Vec<f64> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let omega = family
                .draw(RngSeed(hash64(sub_seed, i as u64)))
                .expect("validated");
            rangefinder_rsvd(inst, &omega)
                .expect("valid instance")
                .ratio
        })
        .collect()
}

fn summarize(
    panel: &'static str,
    method: &'static str,
    ratios: Vec<f64>,
    master_seed: u64,
    tag: u64,
) -> MethodSummary {
    let se = bootstrap_median_se(&ratios, hash64(master_seed, BOOTSTRAP_STREAM ^ tag));
    let mut sorted = ratios;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    MethodSummary {
        panel,
        method,
        median: percentile(&sorted, 50.0),
        p10: percentile(&sorted, 10.0),
        p90: percentile(&sorted, 90.0),
        median_bootstrap_se: se,
    }
}

fn run_fig1(trials: usize, master_seed: u64) -> Result<FigureData, MonteCarloError> {
    let ls_inst = instances::fixed_budget_ls(hash64(master_seed, LS_INSTANCE_STREAM));
    let rsvd_inst = instances::fixed_budget_low_rank(hash64(master_seed, RSVD_INSTANCE_STREAM));
    let (n, k_ls) = (ls_inst.a().rows(), 256usize);
    let (d, k_lr) = (rsvd_inst.a().cols(), rsvd_inst.r() + 5);

    let ls_methods: [(&'static str, SketchFamily); 3] = [
        ("gaussian", SketchFamily::Gaussian { n, k: k_ls }),
        ("sparse_signed", SketchFamily::SparseSigned { n, k: k_ls }),
        ("lp_sampler", SketchFamily::LpSampler { n, k: k_ls, p: 2.0 }),
    ];
    let rsvd_methods: [(&'static str, SketchFamily); 3] = [
        ("gaussian", SketchFamily::Gaussian { n: d, k: k_lr }),
        (
            "sparse_signed",
            SketchFamily::SparseSigned { n: d, k: k_lr },
        ),
        (
            "lp_sampler",
            SketchFamily::LpSampler {
                n: d,
                k: k_lr,
                p: 2.0,
            },
        ),
    ];

    let mut summaries = Vec::new();
    for (m, (method, family)) in ls_methods.iter().enumerate() {
        let tag = METHOD_STREAM_BASE + m as u64;
        let ratios = ls_ratios(&ls_inst, family, trials, hash64(master_seed, tag));
        summaries.push(summarize("least_squares", method, ratios, master_seed, tag));
    }
    for (m, (method, family)) in rsvd_methods.iter().enumerate() {
        let tag = METHOD_STREAM_BASE + 100 + m as u64;
        let ratios = rsvd_ratios(&rsvd_inst, family, trials, hash64(master_seed, tag));
        summaries.push(summarize("rsvd", method, ratios, master_seed, tag));
    }
    Ok(FigureData::Summary {
        name: "fig1",
        summaries,
    })
}

fn histogram(edges: &[f64], ratios: &[f64]) -> Vec<usize> {
    let bins = edges.len() - 1;
    let lo = edges[0];
    let hi = edges[bins];
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &r in ratios {
        let idx = if r <= lo {
            0
        } else {
            (((r - lo) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    counts
}

fn histogram_series(method: &'static str, ratios: Vec<f64>, edges: &[f64]) -> HistogramSeries {
    let counts = histogram(edges, &ratios);
    let above = ratios.iter().filter(|&&r| r > 1.3).count() as f64 / ratios.len() as f64;
    let mut sorted = ratios;
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    HistogramSeries {
        method,
        counts,
        p99: percentile(&sorted, 99.0),
        mass_above_1_3: above,
    }
}

fn run_fig2(trials: usize, master_seed: u64) -> Result<FigureData, MonteCarloError> {
    let inst = instances::toy_ls();
    // The baseline must actually behave as a near-isometry for the tail
    // comparison to mean anything; k = 64 keeps its ratio fluctuations
    // around the 1/sqrt(k) scale, well inside the one-sided family's tail.
    let ose = SketchFamily::Gaussian { n: 2, k: 64 };
    let osi = SketchFamily::ExpoRankOne { alpha: 0.5 };
    let ose_ratios = ls_ratios(&inst, &ose, trials, hash64(master_seed, METHOD_STREAM_BASE));
    let osi_ratios = ls_ratios(
        &inst,
        &osi,
        trials,
        hash64(master_seed, METHOD_STREAM_BASE + 1),
    );
    let edges: Vec<f64> = (0..=80).map(|b| 1.0 + b as f64 * 0.025).collect();
    Ok(FigureData::Histogram {
        name: "fig2",
        series: vec![
            histogram_series("gaussian", ose_ratios, &edges),
            histogram_series("expo_rank_one", osi_ratios, &edges),
        ],
        edges,
    })
}

fn run_fig3(trials: usize, master_seed: u64) -> Result<FigureData, MonteCarloError> {
    let inst = instances::diag_spiked_30(0.2);
    let ose = SketchFamily::Gaussian { n: 30, k: 1 };
    let osi = SketchFamily::SparseSigned { n: 30, k: 1 };
    let ose_ratios = rsvd_ratios(&inst, &ose, trials, hash64(master_seed, METHOD_STREAM_BASE));
    let osi_ratios = rsvd_ratios(
        &inst,
        &osi,
        trials,
        hash64(master_seed, METHOD_STREAM_BASE + 1),
    );
    let edges: Vec<f64> = (0..=100).map(|b| 1.0 + b as f64 * 0.01).collect();
    Ok(FigureData::Histogram {
        name: "fig3",
        series: vec![
            histogram_series("gaussian", ose_ratios, &edges),
            histogram_series("sparse_signed", osi_ratios, &edges),
        ],
        edges,
    })
}
