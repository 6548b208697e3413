//! `adcsim` experiment driver: loads a converter configuration, runs one of
//! the characterization experiments and writes CSV data plus `summary.json`.

pub mod args;
pub mod commands;
pub mod error;
pub mod output;

pub use args::{Cli, Command};
pub use commands::{load_config, run, RunManifest};
pub use error::CliError;

pub const TOOL: &str = "adcsim";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
