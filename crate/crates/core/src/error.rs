use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown symbol `{name}` at {pos}")]
    UnknownSymbol { pos: usize, name: String },

    #[error("jet order {order} exceeds the configured maximum {max}")]
    MaxJetOrder { order: usize, max: usize },

    #[error("substitution rules are cyclic through `{0}`")]
    SubstitutionCycle(String),

    #[error("substitution did not reach a fixpoint after {0} passes")]
    FixpointNotReached(usize),

    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),

    #[error("non-finite result: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
