use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] trilow_core::Error),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Csv {
        context: String,
        #[source]
        source: csv::Error,
    },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A trial failed; the record stream stops at this id.
    #[error("trial {trial_id}: {source}")]
    Trial {
        trial_id: u64,
        #[source]
        source: Box<HarnessError>,
    },
}

impl HarnessError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    pub(crate) fn csv(context: impl Into<String>, source: csv::Error) -> Self {
        HarnessError::Csv { context: context.into(), source }
    }

    pub(crate) fn in_trial(self, trial_id: u64) -> Self {
        HarnessError::Trial { trial_id, source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
