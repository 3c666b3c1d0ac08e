use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("{context}: {source}")]
    Runtime {
        context: String,
        #[source]
        source: magqubit::Error,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt results file {path}: {message}")]
    Corrupt { path: String, message: String },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn config(path: &str, message: &str) -> Self {
        Self::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } => 2,
            _ => 3,
        }
    }
}

/// Attaches context to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> CliResult<T>;
}

impl<T> Context<T> for magqubit::Result<T> {
    fn context(self, what: &str) -> CliResult<T> {
        self.map_err(|source| match source {
            magqubit::Error::Config(message) => CliError::Config {
                path: what.into(),
                message,
            },
            source => CliError::Runtime {
                context: what.into(),
                source,
            },
        })
    }
}
