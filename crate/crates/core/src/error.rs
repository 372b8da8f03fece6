use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid place index {0}")]
    InvalidPlace(usize),

    #[error("invalid transition index {0}")]
    InvalidTransition(usize),

    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("{0}")]
    Usage(String),

    /// Reaction-DSL or DIMACS syntax error; positions are 1-based.
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    /// Malformed PNML document.
    #[error("pnml: {0}")]
    Format(String),

    #[error("search budget exhausted")]
    BudgetExceeded,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed input files.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::Format(_))
    }
}
