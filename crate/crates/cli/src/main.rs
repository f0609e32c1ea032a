//! `meso`: generate, validate, solve, evaluate and check meso-scale
//! approximations for clusters of spherical inclusions.

mod args;
mod run;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match RunConfig::from_cli(cli) {
        Ok(Some(config)) => config,
        Ok(None) => return ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run::execute(&config) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_model_failure() { 1 } else { 2 })
        }
    }
}
