//! Library side of the `cftray` tool: recording I/O, the report schema and
//! the four commands (`fit`, `simulate`, `eval`, `gof`).
//!
//! Exit codes: 0 on success, 1 when a model or numerical evaluation failed,
//! 2 on usage or parse errors.


// Negated float comparisons are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod args;
pub mod commands;
pub mod io;
pub mod report;

use std::ffi::OsString;

use clap::Parser;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numeric(_) => 1,
            CliError::Usage(_) | CliError::Parse(_) => 2,
        }
    }
}

impl From<cft_rayleigh::Error> for CliError {
    fn from(e: cft_rayleigh::Error) -> Self {
        use cft_rayleigh::Error as E;
        match e {
            E::InvalidParameter { .. } | E::InvalidInput(_) => CliError::Usage(e.to_string()),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match commands::dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
