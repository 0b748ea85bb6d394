//! Command-line front end: argument parsing, overrides and exit codes.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::experiments::{run, Command};
use crate::{AppError, ExperimentConfig};

/// Cavity coupled to a spin ensemble with spectral holes.
#[derive(Debug, Parser)]
#[command(name = "holeburn", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Transmission spectra with and without holes, Lamb shift, resonances.
    Transmission(Args),
    /// |T(ω)|² for hole pairs at ωs ± ω̄.
    Scan(Args),
    /// Single-photon decay N(t) and its decay-rate fit.
    Decay(Args),
    /// Response to the phase-switched pulse train and its relaxation fit.
    Drive(Args),
    /// Volterra solver against the spin-bin oracle, plus invariant checks.
    Verify(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// TOML experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Drop every configured hole.
    #[arg(long)]
    no_holes: bool,
    /// Width of every hole, f/2π in MHz.
    #[arg(long)]
    hole_width_mhz: Option<f64>,
    /// Move the holes to ωs ± X, f/2π in MHz.
    #[arg(long)]
    hole_offset_mhz: Option<f64>,
}

impl Cli {
    /// Runs the parsed command and returns the process exit code:
    /// 0 on success, 2 for invalid input, 3 for solver failures, 1 otherwise.
    pub fn execute(self) -> i32 {
        let (command, args) = match self.command {
            Cmd::Transmission(a) => (Command::Transmission, a),
            Cmd::Scan(a) => (Command::Scan, a),
            Cmd::Decay(a) => (Command::Decay, a),
            Cmd::Drive(a) => (Command::Drive, a),
            Cmd::Verify(a) => (Command::Verify, a),
        };
        match execute(command, &args) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("holeburn: {e}");
                e.exit_code()
            }
        }
    }
}

fn execute(command: Command, args: &Args) -> Result<(), AppError> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(w) = args.hole_width_mhz {
        cfg.set_hole_width(w);
    }
    if let Some(off) = args.hole_offset_mhz {
        cfg.set_hole_offset(off);
    }
    if args.no_holes {
        cfg.holes.clear();
    }
    if !cfg.system_params()?.is_strong_coupling() {
        eprintln!("holeburn: warning: coupling does not exceed kappa; defaults assume strong coupling");
    }
    run(command, &cfg, &args.out)
}
