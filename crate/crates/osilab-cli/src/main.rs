use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

mod output;
mod run;

/// Sketching laboratory: theorem checks, figure data, and closed-form bounds
/// for isotropic one-sided sketches.
#[derive(Parser)]
#[command(name = "osilab", version, about)]
struct Cli {
    /// Master seed; every run is a deterministic function of it.
    #[arg(long, global = true, env = "OSILAB_SEED", default_value_t = 42)]
    seed: u64,

    /// Trial count (defaults to the preset's own).
    #[arg(short = 'N', long = "trials", global = true)]
    trials: Option<usize>,

    /// Output directory for report and data files.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Trial-record format: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Worker threads (default: all cores). Results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a theorem-check preset and write its report plus trial records.
    /// Exits 0 when every probability claim is consistent with simulation.
    Theorem {
        /// One of: ls-counterexample, ls-stronger, ls-rescue, ose-from-osi,
        /// osi-sharpness, rsvd-counterexample, rsvd-rescue,
        /// lp-deterministic, lp-probabilistic.
        name: String,
        /// Mixture collapse probability (ls-counterexample).
        #[arg(long)]
        rho: Option<f64>,
        /// Injectivity defect of the spike sketch (ls-stronger).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Loss scale L >= 1 (ls-stronger).
        #[arg(long = "L")]
        loss: Option<f64>,
        /// Injectivity constant (ls-rescue, ose-from-osi, osi-sharpness).
        #[arg(long)]
        alpha: Option<f64>,
        /// Markov slack for the rescue bounds (ls-rescue, rsvd-rescue).
        #[arg(long)]
        eta: Option<f64>,
        /// Tail ratio of the diagonal test matrix (rsvd-counterexample).
        #[arg(long)]
        tau: Option<f64>,
        /// Subspace dimension (ose-from-osi, osi-sharpness).
        #[arg(long)]
        s: Option<usize>,
        /// Spike probability (ose-from-osi, osi-sharpness).
        #[arg(long)]
        q: Option<f64>,
        /// Norm exponent (lp presets).
        #[arg(long)]
        p: Option<f64>,
        /// Markov level t >= 1 (lp-probabilistic).
        #[arg(long)]
        t: Option<f64>,
        /// Sampler columns (lp presets).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Emit the data files behind one of the comparison figures.
    Figure {
        /// One of: fig1, fig2, fig3.
        name: String,
    },
    /// Print closed-form guarantee values.
    Bounds {
        #[command(subcommand)]
        which: BoundsCommand,
    },
}

#[derive(Subcommand)]
enum BoundsCommand {
    /// Weak embedding implied by an (s, alpha, rho) injection at slack tau.
    ImpliedOse {
        #[arg(long)]
        s: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long)]
        tau: f64,
    },
    /// Classical sqrt(beta/alpha) factor of a two-sided embedding.
    OseFactor {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Least-squares rescue bound factor and success probability.
    Ls {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        #[arg(long)]
        eta: f64,
    },
    /// Low-rank rescue bound factor and success probability.
    Rsvd {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long = "q-minus-r")]
        q_minus_r: usize,
        #[arg(long)]
        eta: f64,
    },
    /// Deterministic lp sketch-and-solve factor.
    LpDet {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        p: f64,
    },
    /// Probabilistic lp factor at Markov level t (or target failure delta).
    LpProb {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        rho: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        // Results are independent of the worker count; this only caps
        // parallelism.
        if rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .is_err()
        {
            eprintln!("warning: thread pool already initialized");
        }
    }
    match run::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
