use thiserror::Error;

/// CLI-level errors, mapped onto the documented process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    ConfigParse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] trilinear::Error),

    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// 2 = unusable configuration, 3 = truncation breach, 4 = numerical
    /// failure (anything else that stops a computation).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigParse(_) => 2,
            CliError::Io { .. } => 2,
            CliError::Core(trilinear::Error::TruncationBreach { .. }) => 3,
            _ => 4,
        }
    }
}

pub fn io_err(path: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
