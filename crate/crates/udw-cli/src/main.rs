//! `udw`: batch runs of the detector computations from a TOML config.

mod commands;
mod config;
mod error;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use commands::Ctx;
use config::{Format, OracleBlock};
use error::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "udw", version, about = "Unruh-DeWitt detectors in a periodic cavity")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; overrides `output.path`. Stdout when neither is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; overrides `output.format`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps and lattice sums.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Convergence tolerance; overrides the section's `tol`.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Vacuum excitation probability as a sequence of partial sums.
    Vep,
    /// Vacuum no-response probability at second order.
    Vnrp,
    /// Wick expansion and value of an operator word.
    Wick,
    /// Diagram enumeration, optionally with amplitudes.
    Diagrams,
    /// Truncated Fock-space checks.
    Oracle {
        /// Overrides or supplies `oracle.action`.
        #[arg(value_enum)]
        action: Option<OracleAction>,
    },
    /// One parameter varied over a grid.
    Sweep,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleAction {
    Compare,
    Evolve,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => config::load(p)?,
        None => config::parse("")?,
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("`--threads` must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Run(e.to_string()))?;
    }
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Config(format!("`--tol` = {t}: must be positive")));
        }
    }
    if let Command::Oracle { action: Some(a) } = cli.command {
        match (&cfg.oracle, a) {
            (None, OracleAction::Compare) => {
                cfg.oracle = Some(config::parse("[oracle]\naction = \"compare\"")?.oracle.unwrap());
            }
            (None, OracleAction::Evolve) => {
                return Err(CliError::Config("`oracle evolve` needs an `[oracle]` block with `cutoff`".into()));
            }
            (Some(OracleBlock::Compare { .. }), OracleAction::Evolve) | (Some(OracleBlock::Evolve { .. }), OracleAction::Compare) => {
                return Err(CliError::Config("`oracle.action` disagrees with the command line".into()));
            }
            _ => {}
        }
    }
    let format = cli.format.or(cfg.output.format).unwrap_or(match cli.command {
        Command::Diagrams | Command::Wick => Format::Text,
        _ => Format::Csv,
    });
    let path = cli.out.clone().or_else(|| cfg.output.path.clone());
    let ctx = Ctx {
        timing: cfg.output.timing,
        cfg,
        tol: cli.tol,
    };
    let out = match cli.command {
        Command::Vep => commands::run_vep(&ctx, format),
        Command::Vnrp => commands::run_vnrp(&ctx, format),
        Command::Wick => commands::run_wick(&ctx, format),
        Command::Diagrams => commands::run_diagrams(&ctx, format),
        Command::Oracle { .. } => commands::run_oracle(&ctx, format),
        Command::Sweep => commands::run_sweep(&ctx, format),
    }?;
    output::emit(&out.text, path.as_deref())?;
    match out.failure {
        Some(m) => Err(CliError::NotConverged(m)),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("udw: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
