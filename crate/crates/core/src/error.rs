use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed text input. `line` and `column` are 1-based.
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("mapping error at line {line}: {message}")]
    Mapping { line: usize, message: String },

    #[error("value error: {0}")]
    Value(String),

    #[error("note {note} spans {frames} frame(s) but owns {phonemes} phoneme(s)")]
    DegenerateSpan {
        note: usize,
        frames: usize,
        phonemes: usize,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("infeasible alignment: {0}")]
    Infeasible(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("wav: {0}")]
    Wav(#[from] hound::Error),
}

impl Error {
    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub(crate) fn value(msg: impl Into<String>) -> Self {
        Error::Value(msg.into())
    }

    /// Line number carried by the error, when it came from a text document.
    pub fn line(&self) -> Option<usize> {
        match self {
            Error::Syntax { line, .. } | Error::Mapping { line, .. } => Some(*line),
            _ => None,
        }
    }
}
