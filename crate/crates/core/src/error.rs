use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ball {ball} is out of range for an instance of {n} balls")]
    BallOutOfRange { ball: usize, n: usize },

    #[error("input must contain at least one ball")]
    EmptyInput,

    #[error("cannot sample {k} items from a population of {m}")]
    SampleTooLarge { k: usize, m: usize },

    #[error("invalid distribution spec `{0}`")]
    InvalidDistribution(String),

    #[error("invalid instance file: {0}")]
    InstanceFormat(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("transcript is inconsistent: balls {left} and {right} are both equal and unequal")]
    InconsistentTranscript { left: usize, right: usize },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Convergence { tolerance: f64, estimate: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
