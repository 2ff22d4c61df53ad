//! `ttc` — run, check, generate and trace reassignment markets.
//!
//! Exit codes: 0 success, 1 violated expectation (golden mismatch or
//! property failure), 2 usage or IO error.

mod cmd;
mod io;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ttc", version, about = "Capacity-aware top trading cycles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the mechanism on a scenario and write the result document.
    Run(cmd::run::Args),
    /// Compare the engine against the exhaustive optimum and property checkers.
    Oracle(cmd::oracle::Args),
    /// Check the mechanism's guarantees on seeded random markets.
    Verify(cmd::verify::Args),
    /// Write a seeded random scenario.
    Gen(cmd::gen::Args),
    /// Print the round-by-round trace, optionally as DOT files.
    Trace(cmd::trace::Args),
    /// Time the engine at growing market sizes.
    Bench(cmd::bench::Args),
}

/// How a command finished when it did not fail outright.
pub enum Status {
    Ok,
    Violated,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(a) => cmd::run::exec(a),
        Command::Oracle(a) => cmd::oracle::exec(a),
        Command::Verify(a) => cmd::verify::exec(a),
        Command::Gen(a) => cmd::gen::exec(a),
        Command::Trace(a) => cmd::trace::exec(a),
        Command::Bench(a) => cmd::bench::exec(a),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violated) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
