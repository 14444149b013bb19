use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid complete intersection: {0}")]
    InvalidSpec(String),

    #[error("weights {0} are not well formed")]
    NotWellFormed(String),

    #[error("stratum index {index} out of range for {len} coordinates")]
    StratumOutOfRange { index: usize, len: usize },

    #[error("invalid stratum: {0}")]
    InvalidStratum(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("mixed degrees: {first} has degree {first_degree} but {second} has degree {second_degree}")]
    MixedDegree {
        first: String,
        first_degree: u64,
        second: String,
        second_degree: u64,
    },

    #[error("unknown variable x{index} (coordinates are x0..x{max})")]
    UnknownVariable { index: usize, max: usize },

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("{0} is not a prime below 65536")]
    InvalidPrime(u64),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid census bounds: {0}")]
    InvalidBounds(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
