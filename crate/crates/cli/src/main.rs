//! `pgd`: command-line front end for pgd-core.
//!
//! Exit status: 0 on success, 1 on I/O failure, 2 on a configuration error,
//! 3 when a numerical routine fails to converge, 4 when `audit --strict` finds
//! a failing check.

mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Config(String),
    Numeric(String),
    Audit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Audit(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numeric(m) => write!(f, "numerical error: {m}"),
            CliError::Audit(m) => write!(f, "audit failed: {m}"),
        }
    }
}

impl From<pgd_core::Error> for CliError {
    fn from(e: pgd_core::Error) -> Self {
        use pgd_core::Error as E;
        match e {
            E::Convergence { .. } | E::Vacuum { .. } | E::Geometry(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let matches = match config::command().try_get_matches() {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand required");
    match commands::run(name, sub) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pgd: {e}");
            ExitCode::from(e.code())
        }
    }
}
