use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("not an automorphism: {0}")]
    NotAutomorphism(String),
    #[error("word is not cyclically reduced")]
    NotCyclicallyReduced,
    #[error("invalid star graph blocks: {0}")]
    BadBlocks(String),
    #[error("invalid Whitehead pair: {0}")]
    InvalidPair(String),
    #[error("partitions are not pairwise compatible")]
    IncompatibleSystem,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hyperplane carriers are not compatible: {0}")]
    IncompatibleCarriers(String),
    #[error("{0}")]
    Other(String),
}
