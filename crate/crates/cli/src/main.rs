//! `torus-entropy`: classical purity and entropy analogs from the command
//! line.
//!
//! Exit status: 0 on success, 2 for bad input (config, flags, files),
//! 3 when a numerical routine fails. `TORUS_ENTROPY_THREADS` caps the
//! worker pool.

mod commands;
mod config;
mod error;
mod output;

use clap::Parser;

use crate::commands::Command;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "torus-entropy", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

const THREADS_VAR: &str = "TORUS_ENTROPY_THREADS";

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        CliError::config(format!(
            "{THREADS_VAR} must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::config(e.to_string()))
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = init_threads().and_then(|_| commands::run(cli.command)) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
