use std::process::ExitCode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] critquench_core::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("oracle comparison failed: {0}")]
    OracleMismatch(String),
}

impl Error {
    /// `2` for rejected input, `3` for numerical failures, `1` otherwise.
    pub fn exit_code(&self) -> ExitCode {
        use critquench_core::Error as Core;
        ExitCode::from(match self {
            Error::Core(Core::InvalidArgument(_)) | Error::Config(_) => 2,
            Error::Core(_) | Error::OracleMismatch(_) => 3,
            Error::Io(_) | Error::Csv(_) | Error::Json(_) => 1,
        })
    }
}
