use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("phase values must have unit modulus (deviation {deviation:.3e})")]
    NotUnimodular { deviation: f64 },
    #[error("qubit {0} appears more than once")]
    DuplicateQubit(usize),
    #[error("qubit {qubit} out of range for a {len}-qubit register")]
    QubitOutOfRange { qubit: usize, len: usize },
    #[error("dense operator of arity {0} is not supported")]
    ArityTooLarge(usize),
    #[error("operator dimension {found} does not match {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("register `{0}` is not defined")]
    UnknownRegister(String),
    #[error("register `{0}` defined twice")]
    DuplicateRegister(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("eigenvalue clusters {a:.12} and {b:.12} are too close to separate")]
    AmbiguousClustering { a: f64, b: f64 },
    #[error("eigendecomposition failed: {0}")]
    Eigen(String),
    #[error("value {value} does not lie on the energy grid")]
    OffGrid { value: f64 },
    #[error("empty dataset")]
    EmptyData,
    #[error("need at least two blocks, got {0}")]
    TooFewBlocks(usize),
    #[error("chain {chain} aborted more than {max} times")]
    TooManyRestarts { chain: u64, max: usize },
    #[error("gauge residual {residual:.3e} exceeds {limit:.1e}")]
    GaugeViolation { residual: f64, limit: f64 },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
