use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("index {index} out of range for dimension {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("entry grid is not rectangular")]
    Ragged,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("zero denominator at entry ({row}, {col})")]
    ZeroDenominator { row: usize, col: usize },
    #[error("entry ({row}, {col}) is not an integer")]
    NonInteger { row: usize, col: usize },
    #[error("rank {rank} is below the required {required}")]
    RankDeficient { rank: usize, required: usize },
    #[error("uniformity level {k} out of range 1..={max}")]
    UniformityOutOfRange { k: usize, max: usize },
    #[error("operation requires an even number of modes, got {0}")]
    OddModeCount(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse scalar `{0}`")]
    InvalidScalar(String),
    #[error("invalid stabilizer generator matrix: {0}")]
    InvalidStabilizer(String),
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("no local symplectic map onto EPR pairs exists for this pairing")]
    NotExtractable,
    #[error("fidelity {target} not reached below {max_db} dB")]
    TargetUnreachable { target: f64, max_db: f64 },
    #[error("fidelity decreases between {from_db} dB and {to_db} dB")]
    NonMonotone { from_db: f64, to_db: f64 },
    #[error("internal consistency check failed: {0}")]
    PostCondition(String),
}

pub type Result<T> = core::result::Result<T, Error>;
