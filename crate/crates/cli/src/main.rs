mod commands;
mod config;
mod error;
mod summary;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Output, RunConfig};
use error::CliError;

/// Spectral checks for 2D Euler flow linearized about a two-mode steady
/// state.
#[derive(Debug, Parser)]
#[command(name = "euler-spec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the slices whose window meets the open disk of radius |p|
    Slices(RunArgs),
    /// Converged nonimaginary eigenvalues and the 2kappa bound
    Spectrum(RunArgs),
    /// Evolve random states on the Fourier box and fit growth rates
    Evolve(RunArgs),
    /// Resolvent norms along the line Re lambda = a
    Resolvent(RunArgs),
    /// Summarize earlier JSON outputs
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON file with default values for any of the flags below
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// JSON files or directories to scan [default: .]
    paths: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    pretty: bool,
}

fn run(cli: Cli) -> Result<commands::Verdict, CliError> {
    let (args, cmd): (RunArgs, fn(&config::Resolved) -> _) = match cli.command {
        Command::Report(r) => {
            let paths = if r.paths.is_empty() {
                summary::default_paths()
            } else {
                r.paths
            };
            let out = Output {
                format: r.format,
                path: r.output,
                pretty: r.pretty,
            };
            return summary::report(&paths, &out);
        }
        Command::Slices(a) => (a, commands::slices),
        Command::Spectrum(a) => (a, commands::spectrum),
        Command::Evolve(a) => (a, commands::evolve),
        Command::Resolvent(a) => (a, commands::resolvent),
    };
    let base = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    let resolved = base.overlay(args.run).resolve()?;
    cmd(&resolved)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    euler_spectrum::exec::init_thread_pool_from_env();
    match run(cli) {
        Ok(verdict) => ExitCode::from(verdict.exit_code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
