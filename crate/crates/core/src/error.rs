use thiserror::Error;

/// Errors raised by the simulation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("embedding window has {got} samples, need at least {need}")]
    InsufficientWindow { got: usize, need: usize },

    #[error("embedding depth mismatch: expected {expected}, got {got}")]
    DepthMismatch { expected: usize, got: usize },

    #[error("embedding depth {depth} is too small (need at least {need})")]
    DepthTooSmall { depth: usize, need: usize },

    #[error("controller integration diverged at t = {t}: {field} is not finite")]
    IntegrationDiverged { t: f64, field: String },

    #[error("plant diverged at t = {t}")]
    PlantDiverged { t: f64 },

    #[error("empty metrics window [{start}, {end}]")]
    EmptyWindow { start: f64, end: f64 },

    #[error("unknown parameter path `{0}`")]
    UnknownParamPath(String),

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config: {field} {constraint}")]
    Validation { field: String, constraint: String },

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            constraint: constraint.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
