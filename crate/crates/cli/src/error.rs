use cubature_core::bounds::BoundError;
use cubature_core::kernel::KernelError;
use cubature_core::HullError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for violated preconditions, 3 for numerical indeterminacy, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Hull(h) | CliError::Kernel(KernelError::Hull(h)) => hull_code(h),
            CliError::Kernel(KernelError::InvalidInput(_)) => 2,
            CliError::Bound(BoundError::InvalidInput(_)) => 2,
            CliError::Bound(_) | CliError::Io(_) | CliError::Output(_) => 1,
        }
    }

    pub fn is_indeterminate(&self) -> bool {
        self.exit_code() == 3
    }
}

fn hull_code(h: &HullError) -> i32 {
    match h {
        HullError::Indeterminate { .. } => 3,
        HullError::DimensionMismatch { .. }
        | HullError::NonFinite(_)
        | HullError::Empty
        | HullError::InvalidArgument(_) => 2,
        _ => 1,
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
