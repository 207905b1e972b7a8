//! Command-line front end for the Kuramoto-Daido Hopf laboratory.
//!
//! Subcommands: spectrum | report | simulate | sweep | verify. Exit codes:
//! 0 success, 1 computation or criterion failure, 2 configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::RunConfig;
use output::ArtifactWriter;

#[derive(Parser)]
#[command(
    name = "kdlab",
    version,
    about = "Spectral analysis and direct simulation of the Kuramoto-Daido model near onset"
)]
struct Cli {
    /// Run-configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory (overrides output.directory).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for sweep rows; 1 is the deterministic reference mode.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Seed override for all randomness in the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalue / generalized-eigenvalue inventory over a K grid and one
    /// tracked branch (spectrum_scan.csv, branch.csv).
    Spectrum,
    /// Transition point, hypothesis checks, reduction coefficients and the
    /// predicted orbit (report.json).
    Report,
    /// One simulation run (series.csv, series_summary.json).
    Simulate,
    /// Bifurcation sweep over sweep.k_values (sweep.csv, sweep_summary.json).
    Sweep,
    /// Full verification suite (verify.json); exits 1 on any failure.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let config_path = cli.config.clone().unwrap_or_else(|| "kdlab.toml".into());
    let config_text = match std::fs::read_to_string(&config_path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("cannot read config {}: {e}", config_path.display());
            return ExitCode::from(2);
        }
    };
    let mut config = match RunConfig::parse(&config_text) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("invalid config {}: {e}", config_path.display());
            return ExitCode::from(2);
        }
    };
    if let Some(seed) = cli.seed {
        config.simulation.seed = seed;
    }
    let out_dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(&config.output.directory));
    let threads = cli.threads.max(1);

    let subcommand = match cli.command {
        Command::Spectrum => "spectrum",
        Command::Report => "report",
        Command::Simulate => "simulate",
        Command::Sweep => "sweep",
        Command::Verify => "verify",
    };
    let writer = match ArtifactWriter::new(
        &out_dir,
        &config_text,
        subcommand,
        config.simulation.seed,
        threads,
    ) {
        Ok(writer) => writer,
        Err(e) => {
            eprintln!("cannot prepare output directory {}: {e}", out_dir.display());
            return ExitCode::from(2);
        }
    };

    let dist = match config.distribution() {
        Ok(dist) => dist,
        Err(e) => {
            eprintln!("invalid distribution: {e}");
            return ExitCode::from(2);
        }
    };

    let outcome = match cli.command {
        Command::Spectrum => commands::cmd_spectrum(&config, &dist, &writer),
        Command::Report => commands::cmd_report(&config, &dist, &writer),
        Command::Simulate => commands::cmd_simulate(&config, &dist, &writer),
        Command::Sweep => commands::cmd_sweep(&config, &dist, &writer, threads),
        Command::Verify => {
            return match commands::cmd_verify(&writer) {
                Ok(true) => ExitCode::SUCCESS,
                Ok(false) => ExitCode::from(1),
                Err(e) => {
                    eprintln!("verify failed to run: {e}");
                    ExitCode::from(1)
                }
            }
        }
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{subcommand} failed: {e}");
            ExitCode::from(1)
        }
    }
}
