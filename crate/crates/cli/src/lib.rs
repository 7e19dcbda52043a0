//! Library side of the `horoflow` command-line tool: config parsing,
//! command dispatch and artifact writing.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

pub use config::{parse_config, CommandKind, RunConfig};
pub use error::{CliError, Result};

/// Worker-thread cap from `HOROFLOW_THREADS`, defaulting to the available cores.
pub fn thread_cap(value: Option<&str>) -> Result<usize> {
    match value {
        None => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::config("HOROFLOW_THREADS", format!("must be a positive integer, got `{v}`"))),
        },
    }
}

/// Reads, validates and runs a config file. The output directory is `out`
/// if given, else the config's `output_dir`, else the working directory.
pub fn execute(command: CommandKind, config_path: &Path, out: Option<&Path>, threads: usize) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::config("config", format!("cannot read {}: {e}", config_path.display())))?;
    let config = parse_config(&text, Some(command))?;
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir().cloned())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::run(&config, &dir, threads)
}
