use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("data: {0}")]
    Data(String),
    #[error("{module}: {message}")]
    Physics { module: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Physics { .. } => 4,
        }
    }

    pub fn physics(module: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Physics { module, message: e.to_string() }
    }
}

impl From<ringtrap::data::DataError> for CliError {
    fn from(e: ringtrap::data::DataError) -> Self {
        match e {
            ringtrap::data::DataError::Empty => CliError::Usage("empty dataset".into()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<ringtrap::TrapError> for CliError {
    fn from(e: ringtrap::TrapError) -> Self {
        CliError::physics("trapmodel", e)
    }
}

impl From<ringtrap::CavityError> for CliError {
    fn from(e: ringtrap::CavityError) -> Self {
        match e {
            ringtrap::CavityError::Data(m) => CliError::Data(m),
            other => CliError::physics("cavity", other),
        }
    }
}

impl From<ringtrap::EnsembleError> for CliError {
    fn from(e: ringtrap::EnsembleError) -> Self {
        match e {
            ringtrap::EnsembleError::InvalidInput(m) => CliError::Data(m),
            other => CliError::physics("ensemble", other),
        }
    }
}

impl From<ringtrap::KineticsError> for CliError {
    fn from(e: ringtrap::KineticsError) -> Self {
        match e {
            ringtrap::KineticsError::Data(m) => CliError::Data(m),
            other => CliError::physics("kinetics", other),
        }
    }
}
