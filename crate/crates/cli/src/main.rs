mod commands;
mod config;
mod output;
mod run;

use clap::{Parser, Subcommand};
use commands::Artifact;
use config::Overrides;
use std::path::PathBuf;
use std::process::ExitCode;

/// Optimal payoffs under a Bregman–Wasserstein constraint to a benchmark.
#[derive(Debug, Parser)]
#[command(name = "bwopt", version)]
struct Cli {
    /// TOML experiment configuration; defaults to the first example.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of quadrature panels (overrides `quadrature.panels`).
    #[arg(long, global = true)]
    quad_panels: Option<usize>,
    /// Number of stock-price grid points for payoff curves
    /// (overrides `stock_grid.points`).
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// BW divergences of the strategies from the benchmark and the chosen ε.
    Divergence,
    /// Smallest attainable divergence for the budget.
    EpsilonMin,
    /// Solve every (generator, γ) pair of the configuration.
    Solve,
    /// Quantile curves and payoffs of the benchmark and strategies.
    Payoff,
    /// Regenerate a reference table or the curves behind the figures.
    Reproduce {
        #[arg(value_enum)]
        artifact: Artifact,
    },
}

enum Failure {
    Config(anyhow::Error),
    Solver(String),
    Other(anyhow::Error),
}

impl From<bwopt_core::Error> for Failure {
    fn from(e: bwopt_core::Error) -> Self {
        Failure::Solver(e.to_string())
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast::<bwopt_core::Error>() {
            Ok(core) => Failure::Solver(core.to_string()),
            Err(e) => Failure::Other(e),
        }
    }
}

fn failed_runs(report: &run::Report) -> Result<(), Failure> {
    if report.failures.is_empty() {
        return Ok(());
    }
    let lines: Vec<String> = report
        .failures
        .iter()
        .map(|f| format!("{} gamma={}: {}", f.generator, f.gamma, f.error))
        .collect();
    Err(Failure::Solver(lines.join("\n")))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let overrides = Overrides {
        out: cli.out,
        quad_panels: cli.quad_panels,
        grid: cli.grid,
    };
    let file = config::load(cli.config.as_deref()).map_err(Failure::Config)?;
    let exp = config::resolve(file, &overrides).map_err(Failure::Config)?;
    config::prepare_output(&exp.out).map_err(Failure::Config)?;
    let dir = exp.out.clone();

    match cli.command {
        Command::Divergence => print!("{}", commands::divergence(&exp, &dir)?),
        Command::EpsilonMin => print!("{}", commands::epsilon_min(&exp, &dir)?),
        Command::Payoff => print!("{}", commands::payoff(&exp, &dir)?),
        Command::Solve => {
            let report = run::run(&exp, &dir)?;
            print!("{}", run::write_summary(&report, &dir)?);
            failed_runs(&report)?;
        }
        Command::Reproduce { artifact } => {
            let r = commands::reproduce(artifact, &exp, &dir)?;
            print!("{}", r.text);
            failed_runs(&r.report)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("solver error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
