use thiserror::Error;

/// Errors surfaced by dataset construction, model fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// A reserved CSV column is missing from the header.
    #[error("missing required column `{0}`")]
    Schema(String),
    /// A cell could not be parsed; rows are 1-based and count the header.
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    /// Input data violates a structural contract.
    #[error("invalid data: {0}")]
    Validation(String),
    /// A caller-supplied argument is out of contract.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The operation requires at least one observed event.
    #[error("no events")]
    NoEvents,
    /// Concordance and ranking losses need at least one censoring-comparable pair.
    #[error("no comparable pairs; all censored or degenerate")]
    NoComparablePairs,
    /// An iterative fit left the admissible region.
    #[error("training diverged: {0}")]
    Diverged(String),
    /// An operation was called before its prerequisite state existed.
    #[error("invalid state: {0}")]
    State(String),
    /// A per-model failure inside a multi-model run, annotated with the
    /// model's name; the wrapped error keeps its kind.
    #[error("model `{name}`: {source}")]
    Model {
        name: String,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed input or arguments rather than
    /// a runtime failure; CLI front-ends map these to exit code 2.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Schema(_) | Error::Parse { .. } | Error::Validation(_) | Error::Argument(_) => {
                true
            }
            Error::Model { source, .. } => source.is_validation(),
            _ => false,
        }
    }

    /// Wraps an error with the model it came from.
    pub fn for_model(name: impl Into<String>, source: Error) -> Error {
        Error::Model {
            name: name.into(),
            source: Box::new(source),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
