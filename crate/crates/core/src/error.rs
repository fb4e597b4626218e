use thiserror::Error;

/// Unified error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    NvarsMismatch(usize, usize),

    #[error("substitution expects {expect} images, got {got}")]
    SubstitutionArity { expect: usize, got: usize },

    #[error("polynomial depends on projected-out variable {var}")]
    ProjectedVariable { var: usize },

    #[error("invalid input: {0}")]
    BadInput(String),

    #[error("window is degenerate or malformed: {0}")]
    BadWindow(String),

    #[error("no regular points found in the requested window")]
    NoRegularPoints,

    #[error("family is not odd in the fiber variables: offending term {0}")]
    NotOdd(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
