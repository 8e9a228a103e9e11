use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("atom mismatch: {left} vs {right}")]
    AtomMismatch { left: String, right: String },

    #[error("not divisible: {0}")]
    NotDivisible(String),

    #[error("embedding not applicable: {0}")]
    Inapplicable(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid element: {0}")]
    InvalidElement(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("ill-typed hom at {path}: {reason}")]
    IllTyped { path: String, reason: String },

    #[error("no preimage found: {0}")]
    NoPreimageFound(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not surjective: {0}")]
    NotSurjective(String),

    #[error("invalid thread: {0}")]
    InvalidThread(String),

    #[error("stage {stage}: {source}")]
    AtStage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_stage(self, stage: usize) -> Self {
        Error::AtStage {
            stage,
            source: Box::new(self),
        }
    }
}
