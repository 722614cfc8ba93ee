//! Error split matching the exit-code contract: usage errors exit 1,
//! data errors exit 2.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError::Data(message.into())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<diffnet::simulate::SimulateError> for CliError {
    fn from(e: diffnet::simulate::SimulateError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<diffnet::inference::InferenceError> for CliError {
    fn from(e: diffnet::inference::InferenceError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<diffnet::eval::EvalError> for CliError {
    fn from(e: diffnet::eval::EvalError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<diffnet::likelihood::LikelihoodError> for CliError {
    fn from(e: diffnet::likelihood::LikelihoodError) -> Self {
        CliError::Usage(e.to_string())
    }
}
