use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] vtslab_core::Error),
    #[error("cannot read configuration: {0}")]
    TomlParse(#[from] toml::de::Error),
    #[error("cannot write configuration: {0}")]
    TomlWrite(#[from] toml::ser::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("nothing to emit")]
    EmptyResults,
}

pub type Result<T> = std::result::Result<T, HarnessError>;
