//! `skewconf`: benchmarks and diagnostics for split conformal prediction
//! with a skew-adaptive interval gauge.
//!
//! Subcommands: `bench` (CSV benchmark), `synth` (synthetic data),
//! `phi` (width-efficiency report), `validate` (statistical checks).
//! See `--help` per subcommand, and [`error`] for the exit-code contract.

mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = args::Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
