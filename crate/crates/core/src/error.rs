use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("constraint must have at least one body literal")]
    EmptyConstraint,

    #[error("unknown atom id {0}")]
    UnknownAtom(u32),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("learned nogood store capacity exceeded ({0} nogoods)")]
    LearnedCapacity(usize),

    #[error("model verification failed: {0}")]
    Verification(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
