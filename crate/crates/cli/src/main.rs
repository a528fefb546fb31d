use std::process::ExitCode;

use clap::{Parser, Subcommand};
use darwinism::Error;

mod cache;
mod commands;
mod config;

use commands::{ClassifyArgs, SimulateArgs, SweepArgs};

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_CAP: u8 = 65;
pub const EXIT_CLOSURE: u8 = 4;
pub const EXIT_IO: u8 = 74;

/// Classify system-environment Hamiltonians for quantum Darwinism and
/// simulate mutual-information profiles.
#[derive(Parser, Debug)]
#[command(name = "darwinism", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural verdict. Exit 0 supports, 2 fails, 3 schedule prefix only.
    Classify(ClassifyArgs),
    /// Trial-averaged mutual information against fragment size over time.
    Simulate(SimulateArgs),
    /// Repeat a simulation across values of one parameter.
    Sweep(SweepArgs),
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::DimensionCap { .. } | Error::ResourceCap(_) | Error::TooManySamples { .. } => EXIT_CAP,
        Error::ClosureInconclusive { .. } => EXIT_CLOSURE,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let res = match &cli.command {
        Command::Classify(a) => commands::classify_cmd(a),
        Command::Simulate(a) => commands::simulate_cmd(a),
        Command::Sweep(a) => commands::sweep_cmd(a),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
