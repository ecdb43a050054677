use std::path::PathBuf;
use thiserror::Error;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Arg(String),

    #[error(transparent)]
    Core(#[from] delay_esn::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        CliError::Format {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Process exit code: 2 argument error, 3 data/format error, 4 numerical
    /// failure.
    pub fn exit_code(&self) -> u8 {
        use delay_esn::Error as E;
        match self {
            CliError::Arg(_) => 2,
            CliError::Io { .. } | CliError::Format { .. } => 3,
            CliError::Core(core) => match core {
                E::Config(_) | E::InvalidArgument(_) | E::Dimension(_) => 2,
                E::InsufficientData(_)
                | E::DegenerateSeries(_)
                | E::ZeroReference
                | E::NonFinite(_) => 3,
                E::SingularSystem
                | E::Generation(_)
                | E::Integration { .. }
                | E::Ablation(_)
                | E::Aggregation(_) => 4,
            },
        }
    }
}
