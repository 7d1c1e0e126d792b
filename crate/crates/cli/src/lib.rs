//! Configuration loading, command dispatch and file output for the `chatter` binary.

pub mod chart;
pub mod commands;
pub mod config;
pub mod output;

pub use commands::{resolve_out_dir, run, Command, Outcome, Overrides, OUT_DIR_ENV};
pub use config::{load_config, parse_config, ConfigError, LoadError, RunConfig, BENCHMARK};
