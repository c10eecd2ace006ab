mod args;
mod bench;
mod commands;
mod selftest;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

/// Exit code 2 for usage and input problems, 1 for broken invariants.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let verbose = cli.verbose;
    let threads = cli.threads;
    let work = move || match cli.command {
        Command::Score(a) => commands::score(&a, verbose),
        Command::Enhance(a) => commands::enhance(&a, verbose),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Selftest(a) => selftest::run(&a),
        Command::Bench(a) => bench::run(&a, threads),
    };
    ife_core::with_threads(threads, work).map_err(|e| CliError::Internal(e.to_string()))?
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ife: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
