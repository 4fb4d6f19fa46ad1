use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swipt_cli::output::{emit, render};
use swipt_cli::{run_capacity_sweep, run_lemma1_curve, run_oracle_validation, ExperimentConfig, Format};

/// Capacity sweeps and validation runs for the SWIPT integrated receiver.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Capacity and lower bounds across the LNA-gain sweep.
    Sweep(Common),
    /// L2 distance between the noncentral chi-squared CDF and its normal fit.
    Lemma1(Common),
    /// Monte-Carlo and exact-transform checks of the Gaussian transition law.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment config; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config's `format`.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Overrides the config's Monte-Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the exact-transform transition density (slow).
    #[arg(long)]
    exact_oracle: bool,
}

const CONFIG_ERROR: u8 = 1;
const NOT_CONVERGED: u8 = 2;
const VALIDATION_FAILED: u8 = 3;

fn load(args: &Common) -> Result<ExperimentConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p).map_err(|e| e.to_string())?,
        None => ExperimentConfig::default(),
    };
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if args.out.is_some() {
        cfg.output_path = args.out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let args = match &cli.command {
        Command::Sweep(a) | Command::Lemma1(a) | Command::Validate(a) => a,
    };
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(ExitCode::from(CONFIG_ERROR));
        }
    };
    let out = cfg.output_path.as_deref();
    match cli.command {
        Command::Sweep(_) => {
            let rows = run_capacity_sweep(&cfg, args.exact_oracle);
            emit(&render(&rows, cfg.format)?, out)?;
            let failed = rows.iter().filter(|r| !r.converged).count();
            if failed > 0 {
                eprintln!("{failed} of {} rows did not converge", rows.len());
                return Ok(ExitCode::from(NOT_CONVERGED));
            }
        }
        Command::Lemma1(_) => {
            let rows = match run_lemma1_curve(cfg.lemma1.dof, &cfg.lemma1.s_list) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(NOT_CONVERGED));
                }
            };
            emit(&render(&rows, cfg.format)?, out)?;
        }
        Command::Validate(_) => {
            let checks = match run_oracle_validation(&cfg, args.exact_oracle) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(NOT_CONVERGED));
                }
            };
            emit(&render(&checks, cfg.format)?, out)?;
            let failed: Vec<_> = checks.iter().filter(|c| !c.pass).collect();
            for c in &failed {
                eprintln!("FAIL {} at u = {} x mean: {:.3e} > {:.3e}", c.check, c.u_multiple, c.value, c.threshold);
            }
            if !failed.is_empty() {
                return Ok(ExitCode::from(VALIDATION_FAILED));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
