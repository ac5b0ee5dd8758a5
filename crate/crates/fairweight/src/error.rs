use std::path::{Path, PathBuf};

use fairweight_core::data::DataError;
use fairweight_core::effects::EffectsError;
use fairweight_core::graph::GraphError;
use fairweight_core::model::ModelError;
use fairweight_core::synth::SynthError;
use fairweight_core::trainer::{ProtocolError, TrainError};

/// Every failure the CLI can report. The display form starts with the
/// category, e.g. `config error: ...`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("data error: {0}")]
    Data(String),
    #[error("graph error: {0}")]
    Graph(#[from] GraphError),
    #[error("model error: {0}")]
    Model(#[from] ModelError),
    #[error("training error: {0}")]
    Train(#[from] TrainError),
    #[error("effects error: {0}")]
    Effects(#[from] EffectsError),
    #[error("synth error: {0}")]
    Synth(#[from] SynthError),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code. 0 and 1 are reserved for fair and unfair results.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Graph(_) => 2,
            Error::Io { .. } => 3,
            Error::Data(_) => 4,
            Error::Model(_) | Error::Train(_) | Error::Effects(_) | Error::Synth(_) => 5,
            Error::Checkpoint(_) => 6,
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<DataError> for Error {
    fn from(e: DataError) -> Self {
        Error::Data(e.to_string())
    }
}

impl From<ProtocolError> for Error {
    fn from(e: ProtocolError) -> Self {
        match e {
            ProtocolError::NoRepeats => Error::Config(e.to_string()),
            ProtocolError::Data(e) => e.into(),
            ProtocolError::Model(e) => e.into(),
            ProtocolError::Train(TrainError::Config(msg)) => Error::Config(msg),
            ProtocolError::Train(e) => e.into(),
            ProtocolError::Effects(e) => e.into(),
        }
    }
}

pub(crate) fn read(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn read_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
