mod args;
mod commands;
mod input;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Why a command stopped: bad invocation (exit 2) or bad data (exit 1).
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Data(String),
}

impl From<embedlab_core::Error> for Failure {
    fn from(e: embedlab_core::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn emit(cli: &Cli, mut text: String) -> Result<(), Failure> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Data(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Data(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = commands::run(&cli).and_then(|out| match out {
        Some(text) => emit(&cli, text),
        None => Ok(()),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
