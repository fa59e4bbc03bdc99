//! Subcommand dispatch: preset construction, execution, and exit codes.

use crate::{BoundsCommand, Cli, Command};
use osilab::bounds;
use osilab::montecarlo::{FigurePreset, TheoremPreset, Verdict};
use std::process::ExitCode;

pub type AnyError = Box<dyn std::error::Error>;

fn usage(msg: impl Into<String>) -> AnyError {
    msg.into().into()
}

pub fn dispatch(cli: &Cli) -> Result<ExitCode, AnyError> {
    match &cli.command {
        Command::Theorem { .. } => run_theorem(cli),
        Command::Figure { name } => run_figure(cli, name),
        Command::Bounds { which } => run_bounds(which),
    }
}

fn build_preset(cli: &Cli) -> Result<TheoremPreset, AnyError> {
    let Command::Theorem {
        name,
        rho,
        epsilon,
        loss,
        alpha,
        eta,
        tau,
        s,
        q,
        p,
        t,
        k,
    } = &cli.command
    else {
        unreachable!("checked by dispatch");
    };
    let preset = match name.as_str() {
        "ls-counterexample" => TheoremPreset::LsCounterexample {
            rho: rho.unwrap_or(0.3),
        },
        "ls-stronger" => TheoremPreset::LsStronger {
            epsilon: epsilon.unwrap_or(0.1),
            loss: loss.unwrap_or(2.0),
        },
        "ls-rescue" => TheoremPreset::LsRescue {
            alpha: alpha.unwrap_or(0.5),
            eta: eta.unwrap_or(0.1),
        },
        "ose-from-osi" => TheoremPreset::OseFromOsi {
            s: s.unwrap_or(4),
            alpha: alpha.unwrap_or(0.5),
            q: q.unwrap_or(0.25),
            tau: tau.unwrap_or(0.2),
        },
        "osi-sharpness" => TheoremPreset::OsiSharpness {
            s: s.unwrap_or(4),
            alpha: alpha.unwrap_or(0.5),
            q: q.unwrap_or(0.25),
        },
        "rsvd-counterexample" => TheoremPreset::RsvdCounterexample {
            tau: tau.unwrap_or(0.2),
        },
        "rsvd-rescue" => TheoremPreset::RsvdRescue {
            eta: eta.unwrap_or(0.1),
        },
        "lp-deterministic" => TheoremPreset::LpDeterministic {
            p: p.unwrap_or(1.0),
            k: k.unwrap_or(3),
        },
        "lp-probabilistic" => TheoremPreset::LpProbabilistic {
            p: p.unwrap_or(1.0),
            t: t.unwrap_or(4.0),
            k: k.unwrap_or(3),
        },
        other => {
            return Err(usage(format!(
                "unknown theorem preset `{other}` (expected one of: {})",
                TheoremPreset::NAMES.join(", ")
            )))
        }
    };
    Ok(preset)
}

fn run_theorem(cli: &Cli) -> Result<ExitCode, AnyError> {
    let preset = build_preset(cli)?;
    let trials = cli.trials.unwrap_or_else(|| preset.default_trials());
    let report = preset.run(trials, cli.seed)?;

    std::fs::create_dir_all(&cli.out)?;
    let report_path = cli.out.join(format!("{}_report.json", report.preset));
    std::fs::write(&report_path, crate::output::report_json(&report))?;
    let records_path = match cli.format.as_str() {
        "csv" => {
            let path = cli.out.join(format!("{}_trials.csv", report.preset));
            std::fs::write(&path, osilab::montecarlo::records_to_csv(&report.records))?;
            path
        }
        "json" => {
            let path = cli.out.join(format!("{}_trials.json", report.preset));
            std::fs::write(&path, crate::output::records_json(&report.records))?;
            path
        }
        other => return Err(usage(format!("unknown format `{other}` (csv|json)"))),
    };

    for check in &report.checks {
        println!(
            "{}: {} (claimed {:.6}, empirical {:.6}, 3*se {:.6})",
            check.name,
            check.report.verdict.as_str(),
            check.report.claimed,
            check.report.empirical,
            3.0 * check.report.mc_std_error
        );
    }
    println!("report: {}", report_path.display());
    println!("trials: {}", records_path.display());
    match report.verdict() {
        Verdict::Consistent => {
            println!("verdict: consistent");
            Ok(ExitCode::SUCCESS)
        }
        Verdict::Violated => {
            println!("verdict: violated");
            Ok(ExitCode::from(1))
        }
    }
}

fn run_figure(cli: &Cli, name: &str) -> Result<ExitCode, AnyError> {
    let preset = match name {
        "fig1" => FigurePreset::Fig1,
        "fig2" => FigurePreset::Fig2,
        "fig3" => FigurePreset::Fig3,
        other => {
            return Err(usage(format!(
                "unknown figure preset `{other}` (expected one of: {})",
                FigurePreset::NAMES.join(", ")
            )))
        }
    };
    let trials = cli.trials.unwrap_or_else(|| preset.default_trials());
    let data = preset.run(trials, cli.seed)?;

    std::fs::create_dir_all(&cli.out)?;
    let csv_path = cli.out.join(format!("{}.csv", data.name()));
    std::fs::write(&csv_path, data.to_csv())?;
    let stats_path = cli.out.join(format!("{}_stats.json", data.name()));
    std::fs::write(
        &stats_path,
        crate::output::figure_json(&data, trials, cli.seed),
    )?;
    println!("data: {}", csv_path.display());
    println!("stats: {}", stats_path.display());
    Ok(ExitCode::SUCCESS)
}

fn run_bounds(which: &BoundsCommand) -> Result<ExitCode, AnyError> {
    match which {
        BoundsCommand::ImpliedOse { s, alpha, rho, tau } => {
            let o = bounds::implied_ose(*s, *alpha, *rho, *tau)?;
            println!(
                "implied OSE: s = {}, alpha = {}, beta = {}, failure = {}",
                o.s, o.alpha, o.beta, o.rho
            );
        }
        BoundsCommand::OseFactor { alpha, beta } => {
            let f = bounds::ose_relative_factor(*alpha, *beta)?;
            println!("two-sided embedding factor sqrt(beta/alpha) = {f}");
        }
        BoundsCommand::Ls { alpha, delta, eta } => {
            let g = bounds::ls_relative_bound(*alpha, *delta, *eta)?;
            println!(
                "squared-ratio factor = {}, success probability >= {}",
                g.factor, g.success_prob
            );
        }
        BoundsCommand::Rsvd {
            alpha,
            rho,
            q_minus_r,
            eta,
        } => {
            let g = bounds::rsvd_relative_bound(*alpha, *rho, *q_minus_r, *eta)?;
            println!(
                "squared-Frobenius factor = {}, success probability >= {}",
                g.factor, g.success_prob
            );
        }
        BoundsCommand::LpDet { alpha, beta, p } => {
            let g = bounds::lp_deterministic_bound(*alpha, *beta, *p)?;
            println!("lp ratio factor = {} (deterministic)", g.factor);
        }
        BoundsCommand::LpProb {
            alpha,
            rho,
            p,
            t,
            delta,
        } => {
            let g = match (t, delta) {
                (Some(t), None) => bounds::lp_probabilistic_bound(*alpha, *rho, *p, *t)?,
                (None, Some(d)) => bounds::lp_probabilistic_bound_delta(*alpha, *rho, *p, *d)?,
                _ => return Err(usage("pass exactly one of --t or --delta")),
            };
            println!(
                "lp ratio factor = {}, success probability >= {}",
                g.factor, g.success_prob
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}
