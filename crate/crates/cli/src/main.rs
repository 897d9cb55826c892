//! `ktensor` command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 verification failure or
//! warning, 4 integrator failure.

mod args;
mod geodesic;
mod kernel;
mod ode;
mod output;
mod verify;

use std::process::ExitCode;

use clap::Parser;
use ktensor_core::Error;

use args::{Cli, Command};

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot set up {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Kernel(a) => kernel::run(a),
        Command::Verify(a) => verify::run(a),
        Command::OdeLemma(a) => ode::run(a),
        Command::Geodesic(a) => geodesic::run(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
