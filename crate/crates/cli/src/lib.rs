//! Command-line front end for `spreadfft-core`: configuration files, the
//! pricing commands and their CSV/JSON output.

pub mod commands;
pub mod config;

pub use config::{parse_config, ConfigError, RunConfig};
