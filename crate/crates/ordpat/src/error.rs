use std::path::PathBuf;

use ordpat_core::ErrorClass;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] ordpat_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}, line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("circulant embedding has a negative eigenvalue {value} (floor {floor})")]
    NegativeEigenvalue { value: f64, floor: f64 },

    #[error("output: {0}")]
    Output(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 usage, 2 input or data, 3 numerical or regime.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Core(e) => match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Numerical => 3,
            },
            Error::NegativeEigenvalue { .. } => 3,
            Error::Io { .. } | Error::Parse { .. } | Error::Config(_) | Error::Output(_) => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Output(e.to_string())
    }
}
