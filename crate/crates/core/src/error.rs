use std::fmt;
use std::io;
use std::path::PathBuf;

/// Location-tagged failure from one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    ParseFile { path: PathBuf, source: ParseError },

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("operation requires an annotated corpus")]
    NotAnnotated,

    #[error("corpus is already annotated")]
    AlreadyAnnotated,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sentence count mismatch: gold has {gold}, predicted has {predicted}")]
    SentenceCountMismatch { gold: usize, predicted: usize },

    #[error("length mismatch in sentence {sentence}: gold has {gold} tokens, predicted has {predicted}")]
    LengthMismatch {
        sentence: usize,
        gold: usize,
        predicted: usize,
    },

    #[error("feature width mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("embedding table digest {found} does not match the model's {expected}")]
    EmbeddingMismatch { expected: String, found: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse_file(path: impl Into<PathBuf>, source: ParseError) -> Self {
        Error::ParseFile {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
