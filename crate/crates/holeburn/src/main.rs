use std::process::ExitCode;

use clap::Parser;
use holeburn_sim::cli::Cli;

fn main() -> ExitCode {
    ExitCode::from(Cli::parse().execute() as u8)
}
