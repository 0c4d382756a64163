//! Command-line front end: run configuration, CSV output with a
//! reproducibility header, one function per subcommand, and the verify suite.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use args::{Cli, Command};
use commands::Context;
use config::RunConfig;
use error::CliError;

/// Resolves the effective config for `cli`: file (if any) over defaults,
/// then the output directory flag or environment variable.
pub fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.global.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(dir) = &cli.global.out_dir {
        config.out_dir = dir.display().to_string();
    }
    Ok(config)
}

/// Runs one subcommand and returns the files it wrote.
pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = effective_config(cli)?;
    let ctx = Context {
        out_dir: PathBuf::from(&config.out_dir),
        config,
        emit_plot: cli.global.emit_plot,
    };
    match &cli.command {
        Command::Spectrum(a) => commands::spectrum(&ctx, a),
        Command::Groundstate(a) => commands::groundstate(&ctx, a),
        Command::Coherent(a) => commands::coherent(&ctx, a),
        Command::Angular(a) => commands::angular(&ctx, a),
        Command::Scattering(a) => commands::scattering(&ctx, a),
        Command::Manybody(a) => commands::manybody(&ctx, a),
        Command::Verify(a) => verify::verify(&ctx, a),
    }
}
