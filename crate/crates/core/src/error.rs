use thiserror::Error;

/// Errors raised by the forging toolkit.
///
/// Every variant maps onto a stable machine-readable code (see [`ForgeError::code`])
/// so front ends can report failures on a single line.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForgeError {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("layout error: {0}")]
    Layout(String),

    #[error("incomplete evaluation: {0}")]
    IncompleteEvaluation(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl ForgeError {
    pub fn code(&self) -> &'static str {
        match self {
            ForgeError::Input(_) => "E_INPUT",
            ForgeError::LengthMismatch { .. } => "E_SIZE",
            ForgeError::ContractViolation(_) => "E_CONTRACT",
            ForgeError::UnboundParameter(_) => "E_UNBOUND",
            ForgeError::Parse { .. } => "E_PARSE",
            ForgeError::Layout(_) => "E_LAYOUT",
            ForgeError::IncompleteEvaluation(_) => "E_INCOMPLETE",
            ForgeError::NonFinite(_) => "E_NONFINITE",
            ForgeError::Io(_) => "E_IO",
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ForgeError::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for ForgeError {
    fn from(err: std::io::Error) -> Self {
        ForgeError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ForgeError>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(ForgeError::LengthMismatch { expected, found })
    }
}
