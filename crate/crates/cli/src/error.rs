use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid model: {0}")]
    Semantic(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    /// 1 for anything wrong with the input, 2 for our own failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 2,
            _ => 1,
        }
    }
}

impl From<glsm_lab::Error> for CliError {
    fn from(e: glsm_lab::Error) -> Self {
        match e {
            glsm_lab::Error::Overflow(_) => CliError::Internal(e.to_string()),
            other => CliError::Semantic(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Internal(e.to_string())
    }
}
