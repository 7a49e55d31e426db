use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or grid violates a precondition of the requested operation.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Config file failed to parse or validate. `line` is 1-based when known.
    #[error("{}", fmt_validation(*.line, .message))]
    Validation { line: Option<usize>, message: String },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("OAM index {index} outside range [{min}, {max}]")]
    OutOfRange { index: i32, min: i32, max: i32 },

    #[error("no coincidences for signal l_s = {0}: conditional spectrum is empty")]
    EmptyConditional(i32),

    #[error("band l_s + l_i = {0} does not intersect the joint spectrum or carries no weight")]
    EmptyBand(i32),

    #[error("amplitude matrix is identically zero")]
    ZeroMatrix,

    #[error("internal numerical error: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn fmt_validation(line: Option<usize>, message: &str) -> String {
    match line {
        Some(line) => format!("config error at line {line}: {message}"),
        None => format!("config error: {message}"),
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code: 1 for anything the user can fix in the config, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Validation { .. } | Error::OutOfRange { .. } => 1,
            _ => 2,
        }
    }
}
