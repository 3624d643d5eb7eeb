use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Numerical(spinlab_core::Error),

    #[error("spin {spin} exceeds the dimension guard; use spin <= {max}")]
    DimensionGuard { spin: f64, max: f64 },

    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit status: 1 config, 2 numerical, 3 dimension guard.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::DimensionGuard { .. } => 3,
        }
    }
}

impl From<spinlab_core::Error> for CliError {
    fn from(e: spinlab_core::Error) -> Self {
        match e {
            spinlab_core::Error::InvalidArgument(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}
