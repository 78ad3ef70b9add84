use thiserror::Error;

/// Failures of exact ring arithmetic. These are always caller mistakes
/// (mixing elements of different rings, invalid ring parameters).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("radicands differ: {0} vs {1}")]
    RadicandMismatch(u64, u64),
    #[error("primes differ: {0} vs {1}")]
    PrimeMismatch(u64, u64),
    #[error("radicand {0} must be a square-free integer in [2, 1000000]")]
    InvalidRadicand(u64),
    #[error("{0} is not a prime below 2^32")]
    InvalidPrime(u64),
    #[error("cannot parse {what} from {input:?}")]
    Parse { what: &'static str, input: String },
}

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition of an operation was violated.
    #[error("precondition: {0}")]
    Usage(String),
    #[error("capacity: {what} would produce about {estimate} points, cap is {cap}")]
    Capacity {
        what: String,
        estimate: String,
        cap: u64,
    },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("config: {0}")]
    Config(String),
    /// An independent recheck rejected a reported result.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::Arith(_) | Error::Config(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Verification(_) | Error::Io(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
