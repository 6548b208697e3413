use std::path::PathBuf;

use adcsim_core::AdcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: AdcError },

    #[error("{0}")]
    Usage(String),

    #[error("{path}: row {row}: {reason}")]
    InputRow { path: PathBuf, row: usize, reason: String },

    #[error("refusing to overwrite {0} (pass --force)")]
    Exists(PathBuf),

    #[error("{0}")]
    Simulation(#[from] AdcError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    /// 2 for configuration and input problems, 3 for failures during a run.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. }
            | CliError::Usage(_)
            | CliError::InputRow { .. }
            | CliError::Exists(_)
            | CliError::Simulation(AdcError::Config { .. } | AdcError::Coherence { .. }) => 2,
            CliError::Simulation(_) | CliError::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
