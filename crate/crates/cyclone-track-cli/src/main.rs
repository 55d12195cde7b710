//! Command-line front end for the vortex-track model.
//!
//! Exit codes: 0 success (fit rejections are verdicts, not failures),
//! 1 input or usage error, 2 numerical failure (integration blowup).

// Duration and scale guards are written `!(x > 0.0)` so NaN flags fail
// validation as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use clap::{Parser, Subcommand};
use cyclone_track::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "cyclone-track",
    version,
    about = "Vortex-track modeling, fitting and forecasting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a coefficient system and write the state series as CSV.
    Simulate(commands::SimulateArgs),
    /// Evaluate the closed-form trajectory and its circle decomposition.
    Trajectory(commands::TrajectoryArgs),
    /// Fit one three-point window of a track.
    Fit(commands::FitArgs),
    /// Fit every three-point window of a track.
    Sweep(commands::SweepArgs),
    /// Forecast from a fitted window.
    Forecast(commands::ForecastArgs),
    /// Score a forecast track against a reference track.
    Evaluate(commands::EvaluateArgs),
    /// Emit phase-plane orbits of the damped reduced system.
    Phase(commands::PhaseArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Trajectory(args) => commands::trajectory(&args),
        Command::Fit(args) => commands::fit(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Forecast(args) => commands::forecast(&args),
        Command::Evaluate(args) => commands::evaluate(&args),
        Command::Phase(args) => commands::phase(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::Blowup { .. }) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
