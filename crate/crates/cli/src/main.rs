//! `lfcheck`: synthesis, resampling and verification runs from the shell.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Why a run stopped; each maps to one exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag combination detected after parsing.
    Usage(String),
    /// Unreadable, malformed or unwritable data.
    Data(lightfield_core::Error),
    /// A tolerance was exceeded under `--assert`.
    Numeric(String),
}

impl From<lightfield_core::Error> for Failure {
    fn from(e: lightfield_core::Error) -> Self {
        Failure::Data(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("lfcheck: cannot configure {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("lfcheck: usage: {m}"),
                Failure::Data(e) => eprintln!("lfcheck: error: {e}"),
                Failure::Numeric(m) => eprintln!("lfcheck: check failed: {m}"),
            }
            ExitCode::from(f.exit_code())
        }
    }
}
