//! Command-line front end for `tripod-memory`: configuration files, scenario
//! runs and CSV / gnuplot output.

mod app;
pub mod config;
pub mod output;

pub use app::{run_command, CliError, Report, OUT_DIR_ENV};
pub use config::{parse_config, ConfigError, RunConfig};
