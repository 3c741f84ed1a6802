use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("truncation mismatch: order {0} vs order {1}")]
    TruncationMismatch(usize, usize),
    #[error("coordinate mode mismatch (additive vs multiplicative)")]
    ModeMismatch,
    #[error("element is not a unit and has no pure h-valuation")]
    NotUnit,
    #[error("pole at {0}")]
    Pole(String),
    #[error("invalid shift: {0}")]
    InvalidShift(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("repeated leg {0}")]
    RepeatedLeg(usize),
    #[error("bad leg index {0}")]
    BadLeg(usize),
    #[error("singular h^0 reduction")]
    Singular,
    #[error("kernel lift admits no solution at grade {0}")]
    LiftFailure(usize),
    #[error("expected a scalar multiple of the identity: {0}")]
    NotScalar(String),
    #[error("not proportional: {0}")]
    NotProportional(String),
    #[error("eigenspace has dimension {0}, expected 1")]
    EigenDimension(usize),
    #[error("{0}")]
    OutOfScope(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
