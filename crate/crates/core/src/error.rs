use thiserror::Error;

/// Errors produced by the engines, the theorem calculators and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("index {index} out of range (valid: {valid})")]
    IndexOutOfRange { index: usize, valid: String },
    #[error("fitness must be strictly positive, got {0}")]
    NonPositiveFitness(String),
    #[error("total fitness of the population is zero")]
    ZeroTotalFitness,
    #[error("tournament size {size} exceeds population size {n}")]
    TournamentTooLarge { size: usize, n: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("no node at {0}")]
    Unoccupied(String),
    #[error("crossover point {0} is not a link of the common region")]
    NotInCommonRegion(String),
    #[error("mask does not cover the required region: {0}")]
    MaskMismatch(String),
    #[error("fragility is undefined for strings of length 1")]
    UndefinedFragility,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("no data rows to plot")]
    EmptyData,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
