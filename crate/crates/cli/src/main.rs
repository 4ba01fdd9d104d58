//! `haarforge`: generate pseudorandom states, run the verification batteries
//! and distinguisher experiments.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or configuration error,
//! 3 I/O error.

mod args;
mod commands;
mod failure;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Verify(a) => commands::verify(a),
        Command::Distinguish(a) => commands::distinguish(a),
        Command::Golden(a) => commands::golden(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("haarforge: {f}");
            f.exit_code()
        }
    }
}
