mod args;
mod commands;
mod format;
mod metrics;
mod validate;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use metrics::EvalError;

/// Version of the CSV column sets and JSON keys.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Solver(String),
    Io(std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Solver(m) => f.write_str(m),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

impl From<bcnet::Error> for CliError {
    fn from(e: bcnet::Error) -> Self {
        use bcnet::Error::*;
        match e {
            InvalidParameter { .. } | RegimeMismatch { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Solver(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Core(e) => e.into(),
            EvalError::Missing(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(CliError::Io),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(CliError::Io),
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Point(a) => emit(&commands::point(&a)?, a.out.out.as_deref())?,
        Command::Sweep(a) => emit(&commands::sweep(&a)?, a.out.out.as_deref())?,
        Command::Simulate(a) => emit(&commands::simulate(&a)?, a.out.out.as_deref())?,
        Command::Validate(a) => {
            let report = validate::run(&a)?;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            emit(&text, a.out.as_deref())?;
            if !report.all_pass {
                for c in report.checks.iter().filter(|c| !c.pass) {
                    eprintln!("check failed: {} at lambda={}", c.name, c.lambda);
                }
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
