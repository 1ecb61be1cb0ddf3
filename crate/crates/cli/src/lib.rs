//! Command-line front end: config parsing, table output and the
//! subcommands themselves. `main.rs` only wires these to clap.

pub mod commands;
pub mod config;
pub mod table;
pub mod validate;

use std::path::Path;

use config::{resolve, ConfigError, RunConfig};

/// Resolves a run configuration from an optional file plus `key=value` flags.
pub fn load_config(path: Option<&Path>, flags: &[String]) -> Result<RunConfig, ConfigError> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    resolve(&text, flags)
}
