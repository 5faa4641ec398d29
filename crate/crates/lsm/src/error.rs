use std::io;
use std::path::{Path, PathBuf};

pub type Result<T, E = LsmError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum LsmError {
    #[error(transparent)]
    Core(#[from] lsm_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("missing file: {}", .0.display())]
    Missing(PathBuf),
    #[error("malformed config {}: {msg}", path.display())]
    Config { path: PathBuf, msg: String },
    #[error("integrity check failed for {}: {msg}", path.display())]
    Integrity { path: PathBuf, msg: String },
    #[error("malformed file {}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("{0}")]
    Usage(String),
}

impl LsmError {
    /// Maps an IO failure on `path` to `Missing` when the file is absent.
    pub fn io(path: &Path, source: io::Error) -> Self {
        if source.kind() == io::ErrorKind::NotFound {
            LsmError::Missing(path.to_path_buf())
        } else {
            LsmError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }

    pub fn format(path: &Path, msg: impl Into<String>) -> Self {
        LsmError::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    pub fn integrity(path: &Path, msg: impl Into<String>) -> Self {
        LsmError::Integrity {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            LsmError::Core(lsm_core::Error::Diverged { .. }) => "training",
            LsmError::Core(_) => "invalid",
            LsmError::Io { .. } => "io",
            LsmError::Missing(_) => "missing",
            LsmError::Config { .. } => "config",
            LsmError::Integrity { .. } => "integrity",
            LsmError::Format { .. } => "format",
            LsmError::Usage(_) => "usage",
        }
    }

    /// Process exit code: usage 2, missing file 3, malformed config 4,
    /// integrity or malformed data 5, training failure 6, anything else 1.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "usage" => 2,
            "missing" => 3,
            "config" => 4,
            "integrity" | "format" => 5,
            "training" => 6,
            _ => 1,
        }
    }

    /// `error: kind=<kind> code=<code> msg=<json string>` on one line.
    pub fn one_line(&self) -> String {
        let msg = serde_json::to_string(&self.to_string()).expect("strings serialize");
        format!("error: kind={} code={} msg={}", self.kind(), self.exit_code(), msg)
    }
}
