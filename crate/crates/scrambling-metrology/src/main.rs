//! Command-line front end: sweeps, validation, cross-engine checks and the
//! checked-in figure presets. All logic lives in the library; this binary
//! only parses arguments, wires files together and formats reports.
//!
//! Exit codes: `0` success, `1` usage or configuration errors, `2` numerical
//! failures (non-convergence, degeneracy, eigensolver trouble).

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use scrambling_metrology::sweep::{fmt_float, safe_gamma_cap, write_strategy_csv};
use scrambling_metrology::{
    compare_strategies, crosscheck, refine_threshold, run_figure2, run_figure3, run_sweep,
    CaseId, Engine, GammaGrid, GridScale, Result, StrategyRunConfig, SweepConfig,
    TruncationPolicy, Winner, DEFAULT_DEGENERACY_EPS,
};

#[derive(Parser)]
#[command(
    name = "scrambling-metrology",
    version,
    about = "Two-phase estimation around a nonlinear bosonic scrambler: \
             information matrices, precision bounds and strategy maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a TOML-configured parameter sweep and write its artifact.
    Sweep(SweepArgs),
    /// Dry-run a sweep config: print the effective settings, check runnability.
    Validate {
        /// Sweep configuration (TOML).
        #[arg(long)]
        config: PathBuf,
    },
    /// Compare the closed-form and numeric engines at a single point.
    Crosscheck(CrosscheckArgs),
    /// Write the four optimized-sloppiness sweep files (one per case).
    Figure2 {
        /// Directory receiving `figure2-<case>.csv`.
        #[arg(long, default_value = "figures")]
        output_dir: PathBuf,
    },
    /// Write the four joint-versus-stepwise strategy tables (one per case).
    Figure3 {
        /// Directory receiving `figure3-<case>.csv`.
        #[arg(long, default_value = "figures")]
        output_dir: PathBuf,
    },
    /// Locate the strength where joint estimation provably wins.
    Threshold(ThresholdArgs),
}

#[derive(clap::Args)]
struct SweepArgs {
    /// Sweep configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the configured output path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Override the worker count (also settable via
    /// SCRAMBLING_METROLOGY_WORKERS).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(clap::Args)]
struct CrosscheckArgs {
    /// Case label: squeezed-cubic, squeezed-quadratic, coherent-cubic or
    /// coherent-quadratic.
    #[arg(long)]
    case: CaseId,
    /// Mean occupation of the probe.
    #[arg(long)]
    nbar: f64,
    /// Scrambling strength (must lie within the numeric safe cap).
    #[arg(long)]
    gamma: f64,
    /// Signal phase.
    #[arg(long, default_value_t = 0.0)]
    phi1: f64,
    /// Override the truncation ceiling.
    #[arg(long)]
    max_dim: Option<usize>,
}

#[derive(clap::Args)]
struct ThresholdArgs {
    /// Case label.
    #[arg(long)]
    case: CaseId,
    /// Mean occupation of the probe.
    #[arg(long, default_value_t = 1.0)]
    nbar: f64,
    /// Smallest strength of the log-spaced search grid.
    #[arg(long, default_value_t = 0.01)]
    gamma_min: f64,
    /// Largest strength of the log-spaced search grid.
    #[arg(long, default_value_t = 10.0)]
    gamma_max: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 41)]
    points: usize,
    /// Engine: analytic or numeric.
    #[arg(long, default_value = "analytic")]
    engine: Engine,
    /// Optionally write the full per-point table as CSV.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Sweep(args) => {
            let mut config = SweepConfig::load(&args.config)?;
            if let Some(output) = args.output {
                config.output = output;
            }
            if let Some(workers) = args.workers {
                config.workers = Some(workers);
            }
            for warning in config.validate()? {
                eprintln!("warning: {warning}");
            }
            let summary = run_sweep(&config)?;
            println!(
                "wrote {} rows ({} flagged) to {}",
                summary.rows,
                summary.flagged,
                summary.path.display()
            );
            Ok(0)
        }
        Command::Validate { config } => {
            let config = SweepConfig::load(&config)?;
            print!("{}", config.describe());
            let warnings = config.validate()?;
            for warning in &warnings {
                eprintln!("warning: {warning}");
            }
            println!("configuration is runnable");
            Ok(0)
        }
        Command::Crosscheck(args) => {
            let mut policy = TruncationPolicy::default();
            if let Some(max_dim) = args.max_dim {
                policy.max_dim = max_dim;
                policy.validate()?;
            }
            let report = crosscheck(args.case, args.nbar, args.gamma, args.phi1, &policy)?;
            println!(
                "cross-check: case={} nbar={} gamma={} phi1={} dim={}",
                report.case, report.nbar, report.gamma, report.phi1, report.dim
            );
            println!(
                "{:<6} {:>24} {:>24} {:>12}",
                "entry", "analytic", "numeric", "rel_dev"
            );
            let entries = [
                ("q11", report.analytic.q11, report.numeric.q11),
                ("q12", report.analytic.q12, report.numeric.q12),
                ("q22", report.analytic.q22, report.numeric.q22),
                ("d12", report.analytic.d12, report.numeric.d12),
            ];
            for ((name, a, n), (_, dev)) in entries.iter().zip(report.deviations.iter()) {
                println!(
                    "{name:<6} {:>24} {:>24} {:>12.3e}",
                    fmt_float(*a),
                    fmt_float(*n),
                    dev
                );
            }
            if report.both_degenerate {
                println!("both engines flag the point as degenerate");
            }
            if report.pass {
                println!("PASS (max relative deviation {:.3e})", report.max_rel_dev);
                Ok(0)
            } else {
                println!("FAIL (max relative deviation {:.3e})", report.max_rel_dev);
                Ok(2)
            }
        }
        Command::Figure2 { output_dir } => {
            for summary in run_figure2(&output_dir)? {
                println!(
                    "wrote {} rows ({} flagged) to {}",
                    summary.rows,
                    summary.flagged,
                    summary.path.display()
                );
            }
            Ok(0)
        }
        Command::Figure3 { output_dir } => {
            for path in run_figure3(&output_dir)? {
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
        Command::Threshold(args) => {
            let config = StrategyRunConfig {
                nbar: args.nbar,
                gamma_grid: GammaGrid {
                    scale: GridScale::Log,
                    min: args.gamma_min,
                    max: args.gamma_max,
                    points: args.points,
                },
                engine: args.engine,
                truncation: TruncationPolicy::default(),
                degeneracy_eps: DEFAULT_DEGENERACY_EPS,
            };
            config.validate()?;
            if args.engine == Engine::Numeric {
                let cap = safe_gamma_cap(args.case.m);
                if args.gamma_max > cap {
                    return Err(scrambling_metrology::Error::Config(format!(
                        "gamma_max: {} exceeds the numeric safe cap {cap} for m = {}",
                        args.gamma_max, args.case.m
                    )));
                }
            }
            let comparison = compare_strategies(
                args.engine,
                args.case,
                args.nbar,
                &config.gamma_grid.values(),
                &config.truncation,
                config.degeneracy_eps,
            )?;
            println!(
                "strategy comparison: case={} nbar={} engine={}",
                args.case, args.nbar, args.engine
            );
            println!(
                "{:>12} {:>14} {:>14} {:>14} winner",
                "gamma", "c_q", "c_t", "c_step_min"
            );
            for p in &comparison.points {
                println!(
                    "{:>12.6e} {:>14.6e} {:>14.6e} {:>14.6e} {}",
                    p.gamma,
                    p.c_q,
                    p.c_t,
                    p.c_step1.min(p.c_step2),
                    p.winner
                );
            }
            match comparison.threshold_gamma {
                Some(grid_gamma) => {
                    println!("joint-win onset (grid): {grid_gamma:.6e}");
                    if let Some(refined) = refine_threshold(
                        args.engine,
                        &comparison,
                        &config.truncation,
                        config.degeneracy_eps,
                    )? {
                        println!("joint-win onset (refined): {refined:.6e}");
                    }
                }
                None => {
                    println!("no provable joint win within the grid");
                    let indeterminate = comparison
                        .points
                        .iter()
                        .filter(|p| p.winner == Winner::Indeterminate)
                        .count();
                    if indeterminate > 0 {
                        println!("({indeterminate} grid points are indeterminate)");
                    }
                }
            }
            if let Some(path) = args.output {
                write_strategy_csv(&path, &comparison)?;
                println!("wrote {}", path.display());
            }
            Ok(0)
        }
    }
}
