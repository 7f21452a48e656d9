use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod commands;
mod config;
mod error;
mod output;

use commands::Command;
use config::{Overrides, RunConfig, GRID_POINTS_ENV};
use error::CliError;

/// Figure data and verification reports for the non-rational SUSY
/// extensions of the harmonic oscillator.
#[derive(Debug, Parser)]
#[command(name = "susyosc", version)]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Config(e.render().to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    let env_points = std::env::var(GRID_POINTS_ENV).ok();
    let result = RunConfig::resolve(&cli.overrides, env_points.as_deref())
        .and_then(|cfg| commands::run(&cli.command, &cfg));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}
