use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use kerr_core::experiment::{describe, run_custom, run_figure, ExperimentConfig, RunOptions, FIGURES};
use kerr_core::validate::{run_validate, ValidateOptions};

/// Kerr-medium fractional revivals: figure data, validation, custom runs.
#[derive(Parser)]
#[command(name = "kerr", version)]
struct Cli {
    /// Output directory for CSV, matrix and JSON files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Truncation dimension override (before moment headroom).
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// Number of time points per series.
    #[arg(long, global = true)]
    grid_points: Option<usize>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the data behind one figure (fig1 ... fig11), or "all".
    Figure { name: String },
    /// Run the cross-module invariant suite.
    Validate,
    /// Run an experiment described by a JSON config file.
    Custom { config: PathBuf },
}

fn run(cli: Cli) -> Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let opts = RunOptions {
        out_dir: cli.out_dir,
        n_max: cli.n_max,
        grid_points: cli.grid_points,
    };
    match cli.command {
        Command::Figure { name } => {
            let names: Vec<&str> = if name == "all" { FIGURES.to_vec() } else { vec![name.as_str()] };
            for n in names {
                let summary = run_figure(n, &opts).with_context(|| format!("figure {n}"))?;
                print!("{}", describe(&summary));
            }
            Ok(true)
        }
        Command::Validate => {
            let report = run_validate(&ValidateOptions { n_max: opts.n_max });
            for check in &report.checks {
                println!("{check}");
            }
            let failures = report.failures().count();
            println!("{} checks, {failures} failed", report.checks.len());
            Ok(failures == 0)
        }
        Command::Custom { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let summary = run_custom(&cfg, &opts)?;
            print!("{}", describe(&summary));
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
