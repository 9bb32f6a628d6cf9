use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-isolated singularity: {0}")]
    NonIsolated(String),
    #[error("not a symmetry of the potential: {0}")]
    NotSymmetry(String),
    #[error("invalid matrix factorization: {0}")]
    InvalidMf(String),
    #[error("morphism is not closed: {0}")]
    NotClosed(String),
    #[error("element is not a member of the submodule")]
    NotMember,
    #[error("non-homogeneous input: {0}")]
    NonHomogeneous(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("ill-posed divisibility query: {0}")]
    NonIntegral(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid document: {0}")]
    Validation(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("internal error: {0}")]
    Internal(String),
}
