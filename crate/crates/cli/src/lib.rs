//! Command-line scenario runner for the magnon double-condensate qubit.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod scenario;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{load_scenario, require_section, Experiment};
use error::{CliError, CliResult};
use output::{write_all, Outcome, Summary};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "magqubit", version, about = "Magnon double-condensate qubit simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One-magnon dispersion, checked against exact diagonalization.
    Dispersion(RunArgs),
    /// Synchronism residuals and root solving.
    Synchronism(RunArgs),
    /// Condensate parameters, square form and level structure.
    #[command(alias = "qubit-params")]
    Qubit(RunArgs),
    /// Time evolution of a condensate occupation state.
    Evolve(RunArgs),
    /// Parameter sweep over one scalar config field.
    Sweep(RunArgs),
    /// Built-in cross-checks between spin, boson and condensate models.
    OracleCheck(RunArgs),
    /// Rabi frequency against condensate occupation.
    Scaling(RunArgs),
    /// Run the experiment named in the config file.
    Run(RunArgs),
    /// Text summary of result files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; defaults to the config's `output` or `results/<name>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub workers: Option<usize>,
    /// Omit timestamps so identical inputs give byte-identical output.
    #[arg(long)]
    pub reproducible: bool,
    /// Also write every table as `(x, y, series)` rows for external plotting.
    #[arg(long)]
    pub plot_data: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Results directory or summary file.
    #[arg(long)]
    pub out: PathBuf,
}

/// Runs one experiment and writes its results; returns the summary.
pub fn run_experiment(
    requested: Option<Experiment>,
    args: &RunArgs,
) -> CliResult<(Summary, PathBuf)> {
    let scenario = load_scenario(&args.config)?;
    let experiment = match (requested, scenario.experiment) {
        (Some(r), Some(c)) if r != c => {
            return Err(CliError::config(
                "experiment",
                &format!("config names '{}' but '{}' was requested", c.name(), r.name()),
            ))
        }
        (Some(r), _) => r,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::config("experiment", "missing; required by `run`")),
    };
    require_section(&scenario, experiment)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| scenario.output.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(&scenario.name));
    let workers = args.workers.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::config("--workers", &e.to_string()))?;
    let mut outcome: Outcome = pool.install(|| experiments::run(experiment, &scenario))?;
    if args.plot_data {
        outcome.add_plot_data()?;
    }
    let summary = Summary::new(&scenario, experiment.name(), &outcome, args.reproducible);
    write_all(&out_dir, &summary, &outcome)?;
    Ok((summary, out_dir))
}

/// Dispatches a parsed command line and returns the process exit code.
pub fn execute(cli: Cli) -> u8 {
    let (requested, args) = match cli.command {
        Command::Report(r) => {
            return match report::report(&r.out) {
                Ok((text, _)) => {
                    print!("{text}");
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            };
        }
        Command::Dispersion(a) => (Some(Experiment::Dispersion), a),
        Command::Synchronism(a) => (Some(Experiment::Synchronism), a),
        Command::Qubit(a) => (Some(Experiment::Qubit), a),
        Command::Evolve(a) => (Some(Experiment::Evolve), a),
        Command::Sweep(a) => (Some(Experiment::Sweep), a),
        Command::OracleCheck(a) => (Some(Experiment::OracleCheck), a),
        Command::Scaling(a) => (Some(Experiment::Scaling), a),
        Command::Run(a) => (None, a),
    };
    match run_experiment(requested, &args) {
        Ok((summary, dir)) => {
            print!("{}", report::render(&summary));
            println!("results: {}", dir.display());
            if summary.passed {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
