use thiserror::Error;

/// Errors raised by the evaluation kernels, the oracle and the I/O formats.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial has no coefficients")]
    EmptyPolynomial,
    #[error("coefficient {index} is not a finite binary64 value")]
    NonFiniteCoefficient { index: usize },
    #[error("evaluation point is not finite")]
    NonFiniteArgument,
    #[error("floating point overflow")]
    Overflow,
    #[error("coefficient vectors differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("gamma_{k} is undefined: k*u must be below 1")]
    GammaOutOfRange { k: u64 },
    #[error("degree {degree} exceeds the supported maximum {max}")]
    DegreeTooLarge { degree: usize, max: usize },
    #[error("condition number is infinite: p(x) is exactly zero")]
    InfiniteCondition,
    #[error("{0} has no finite neighbour in that direction")]
    NoNeighbour(f64),
    #[error("invalid generator parameters: {0}")]
    InvalidSpec(String),
    #[error("target unreachable: {0}")]
    Unreachable(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("arithmetic self-test failed: {0}")]
    SelfTest(&'static str),
    #[error(
        "timer resolution too coarse: a batch took {batch_ns} ns but at least {required_ns} ns \
         is needed; increase the repetition count"
    )]
    TimerResolution { batch_ns: u128, required_ns: u128 },
    #[error("benchmark outputs changed between repetitions ({algorithm}, degree {degree})")]
    Nondeterministic { algorithm: &'static str, degree: usize },
    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
