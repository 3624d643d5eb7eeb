//! Command-line front end for spinlab: config parsing, the subcommands and
//! table output.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

pub use config::{Command, Format, RunConfig};
pub use error::CliError;

/// Flag overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

/// Runs one subcommand and writes its tables. Returns the written paths.
pub fn run(command: Command, mut config: RunConfig, overrides: &Overrides) -> Result<Vec<PathBuf>, CliError> {
    if let Some(out) = &overrides.out {
        config.output.path = out.clone();
    }
    if let Some(format) = overrides.format {
        config.output.format = format;
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = overrides.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    let report = pool.install(|| commands::dispatch(command, &config))?;
    output::write_tables(&config.output.path, config.output.format, &report.echo, &report.tables)
}
