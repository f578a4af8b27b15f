//! Command-line front end for `recourse-cost`: file formats and subcommands.

pub mod commands;
pub mod formats;

use std::io::Write;

use clap::{Parser, Subcommand};

use commands::{
    CompareArgs, EstimateArgs, ExperimentArgs, SimulatePairwiseArgs, SimulateRecourseArgs,
};
use formats::Format;

/// Infer per-feature recourse costs from comparison surveys.
///
/// Exit status: 0 success, 2 invalid input or flags, 3 numerical failure
/// (non-convergence or non-identifiable data).
#[derive(Debug, Parser)]
#[command(name = "recourse-cost", version)]
pub struct Cli {
    /// Format of written files and of `compare` output. Input files are
    /// read as JSON when named `*.json`, CSV otherwise.
    #[arg(long, value_enum, default_value = "csv", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw strengths uniformly on [0, 1) and simulate a pairwise survey.
    SimulatePairwise(SimulatePairwiseArgs),
    /// Draw strengths and simulate a survey over disjoint recourse pairs.
    SimulateRecourse(SimulateRecourseArgs),
    /// Fit zero-mean strengths (and optionally costs) to a survey.
    Estimate(EstimateArgs),
    /// Compare two recourses under a costs file.
    Compare(CompareArgs),
    /// Run a parameter-recovery experiment and write per-trial rows.
    Experiment(ExperimentArgs),
}

/// Runs a parsed command and returns the exit status, reporting errors on
/// `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::SimulatePairwise(a) => commands::simulate_pairwise(a, cli.format),
        Command::SimulateRecourse(a) => commands::simulate_recourse(a, cli.format),
        Command::Estimate(a) => commands::estimate(a, cli.format, stderr),
        Command::Compare(a) => commands::compare(a, cli.format, stdout),
        Command::Experiment(a) => commands::experiment(a, cli.format, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
