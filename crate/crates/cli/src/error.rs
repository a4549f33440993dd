use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {reason}")]
    Field { field: String, reason: String },
    #[error("config: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] maxcons::Error),
    #[error("invariant failed: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn field(field: &str, reason: impl Into<String>) -> Self {
        CliError::Field { field: field.to_string(), reason: reason.into() }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    /// 2 validation, 3 numeric, 4 invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(maxcons::Error::Numeric(_)) => 3,
            CliError::Invariant(_) => 4,
            _ => 2,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
