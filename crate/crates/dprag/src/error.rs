use std::path::PathBuf;

/// Failures surfaced by the command-line layer, each with its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] dprag_core::Error),

    #[error("{}: {message}", path.display())]
    Data { path: PathBuf, message: String },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_DATA: i32 = 4;
pub const EXIT_BACKEND: i32 = 5;

fn core_code(e: &dprag_core::Error) -> i32 {
    use dprag_core::Error as E;
    match e {
        E::InfeasibleBudget { .. } => EXIT_INFEASIBLE,
        E::Backend { .. } => EXIT_BACKEND,
        E::Example { source, .. } => core_code(source),
        _ => EXIT_DATA,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => core_code(e),
            CliError::Data { .. } | CliError::Io(_) => EXIT_DATA,
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Data {
            path: path.into(),
            message: message.to_string(),
        }
    }
}
