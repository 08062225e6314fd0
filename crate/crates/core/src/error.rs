use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("complex is not separated; apply barycentric subdivision first")]
    NotSeparated,
    #[error("group action is not free on simplices: {0}")]
    NonFreeAction(String),
    #[error("unknown orbit: dim {dim}, id {id}")]
    UnknownOrbit { dim: usize, id: usize },
    #[error("mode incompatible with group kind: {0}")]
    ModeMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("sheaf is not functorial: {0}")]
    NotFunctorial(String),
    #[error("sheaf morphism does not commute with corestrictions: {0}")]
    NotAMorphism(String),
    #[error("json error: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;
