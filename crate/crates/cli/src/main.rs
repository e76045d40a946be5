//! `hqubo` command-line front end.
//!
//! Exit codes: 0 success, 2 instance or config parse failure, 64 usage error
//! (bad flag, value or combination), 66 unreadable input, 70 solver failure,
//! 73 output not writable.

mod commands;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hqubo_bench::BenchError;

#[derive(Parser, Debug)]
#[command(
    name = "hqubo",
    version,
    about = "Hybrid tabu / Ising-machine QUBO solver and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one problem and write its trace
    Solve(commands::SolveArgs),
    /// Run algorithms repeatedly over instances and write reports
    Bench(commands::BenchArgs),
    /// Sweep one hyperparameter over a list of values
    Sweep(commands::SweepArgs),
    /// Compare the full solver with its no_sm and no_im ablations
    Ablate(commands::AblateArgs),
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Parse(String),
    Input(String),
    Solver(String),
    Output(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            Self::Parse(_) => 2,
            Self::Usage(_) => 64,
            Self::Input(_) => 66,
            Self::Solver(_) => 70,
            Self::Output(_) => 73,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m)
            | Self::Parse(m)
            | Self::Input(m)
            | Self::Solver(m)
            | Self::Output(m) => m,
        }
    }
}

impl From<hqubo::Error> for CliError {
    fn from(e: hqubo::Error) -> Self {
        match e {
            hqubo::Error::InvalidConfig(_) | hqubo::Error::Capacity { .. } => {
                Self::Usage(e.to_string())
            }
            other => Self::Solver(other.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Solver(e) => e.into(),
            BenchError::Config(m) => Self::Usage(m),
            BenchError::Parse { .. } => Self::Parse(e.to_string()),
            other => Self::Solver(other.to_string()),
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Solve(a) => commands::solve(a),
        Command::Bench(a) => commands::bench(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Ablate(a) => commands::ablate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hqubo: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
