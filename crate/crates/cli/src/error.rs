use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] kitaev_core::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 0 success, 1 usage, 2 resource, 3 numeric or convergence.
    pub fn exit_code(&self) -> i32 {
        use kitaev_core::Error as E;
        match self {
            CliError::Core(E::Resource { .. }) => 2,
            CliError::Core(E::Numeric(_) | E::Convergence { .. }) => 3,
            _ => 1,
        }
    }
}
