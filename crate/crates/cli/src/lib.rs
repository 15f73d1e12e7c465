//! Command-line front end: `game`, `sweep`, `extrapolate`, `occupancy` and
//! `replay`.
//!
//! Exit status is 0 on success, 1 on a usage or configuration error and 2
//! when a single game hits its episode cap.

pub mod args;
pub mod commands;
pub mod config_file;
pub mod manifest;
pub mod output;

use clap::Parser;

pub use args::Cli;
pub use manifest::RunManifest;

/// Runs the tool on a full argument vector (program name first) and returns
/// the exit status.
pub fn run(argv: Vec<String>) -> u8 {
    let argv = match config_file::expand(&argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match commands::dispatch(cli.command, &argv[1..]) {
        Ok(commands::Outcome::Done) => 0,
        Ok(commands::Outcome::NotFrozen) => 2,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
