use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),

    /// A model or analysis routine failed.
    #[error("{module}::{operation}: {source}")]
    Module {
        module: &'static str,
        operation: &'static str,
        #[source]
        source: coordsim_core::Error,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit code: 2 for configuration problems, 3 for numerical or
    /// integration failures, 4 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Module { source, .. } if source.is_numeric() => 3,
            HarnessError::Module { .. } => 2,
            HarnessError::Io { .. } => 4,
        }
    }

    pub(crate) fn module(
        module: &'static str,
        operation: &'static str,
    ) -> impl FnOnce(coordsim_core::Error) -> HarnessError {
        move |source| HarnessError::Module {
            module,
            operation,
            source,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> HarnessError {
        let path = path.into();
        move |source| HarnessError::Io { path, source }
    }
}
