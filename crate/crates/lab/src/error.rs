use std::fmt;

use eqdist_core::Error as CoreError;

/// Failure classes of a command, each with its process exit code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LabError {
    /// Unreadable or invalid configuration, fixtures or inputs.
    #[error("config error: {0}")]
    Config(String),
    /// The input violates a gate or an assumption of a computation.
    #[error("gate failure: {0}")]
    Gate(String),
    /// A size or depth cap was hit.
    #[error("resource cap: {0}")]
    Cap(String),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 1,
            LabError::Gate(_) => 2,
            LabError::Cap(_) => 3,
        }
    }

    pub fn config(msg: impl fmt::Display) -> Self {
        LabError::Config(msg.to_string())
    }
}

impl From<CoreError> for LabError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::DegenerateMap
            | CoreError::DegreeTooSmall(_)
            | CoreError::InseparableMap
            | CoreError::CharDividesDegree { .. }
            | CoreError::GoodReductionFailure { .. }
            | CoreError::NotTame
            | CoreError::LiftFailure
            | CoreError::Precondition(_)
            | CoreError::UnsupportedPoint(_) => LabError::Gate(msg),
            CoreError::CapExceeded { .. } | CoreError::NonCofinite { .. } => LabError::Cap(msg),
            _ => LabError::Config(msg),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Config(e.to_string())
    }
}

pub type LabResult<T> = Result<T, LabError>;
