use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: u64,
        message: String,
    },
    #[error("{source_name}: empty input (no header row)")]
    Empty { source_name: String },
    #[error(transparent)]
    Data(#[from] catassoc_core::Error),
    /// A flag whose value does not fit the data or the command.
    #[error("{flag}: {message}")]
    Usage { flag: String, message: String },
}

impl Error {
    pub fn usage(flag: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Usage {
            flag: flag.into(),
            message: message.into(),
        }
    }

    /// 1 for usage errors, 2 for data errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage { .. } => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
