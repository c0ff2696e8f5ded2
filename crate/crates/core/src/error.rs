use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid alternative set: {0}")]
    InvalidAlternatives(String),

    #[error("unknown alternative `{0}`")]
    UnknownAlternative(String),

    #[error("invalid preference profile: {0}")]
    InvalidProfile(String),

    #[error("invalid pairwise counts: {0}")]
    InvalidCounts(String),

    #[error("margin matrix is not antisymmetric at ({row}, {col})")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("invalid selection matrix: {0}")]
    InvalidSelection(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dataset has no records")]
    EmptyDataset,

    #[error("simplex did not terminate within {0} pivots")]
    SimplexIterationLimit(usize),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
