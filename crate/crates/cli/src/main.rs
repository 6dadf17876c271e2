//! `halfsign` command-line driver.
//!
//! Exit status: 0 success, 1 counterexample checks failed, 2 input error,
//! 3 ingested data inconsistent with recomputed values.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Theta(a) => commands::theta(a),
        Command::Counterexample(a) => commands::counterexample(a),
        Command::Scan(a) => commands::scan(a),
        Command::Lift(a) => commands::lift(a),
        Command::Diag(a) => commands::diag(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("halfsign: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
