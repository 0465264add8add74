use thiserror::Error;

/// Every failure mode of the library. The CLI maps these onto exit codes.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sum of kappa is {sum}, expected -2d = {expected}")]
    SumMismatch { sum: i64, expected: i64 },
    #[error("kappa entry k_{index} = {value} is below 1-d = {min}")]
    EntryTooSmall { index: usize, value: i64, min: i64 },
    #[error("d must be at least 2, got {0}")]
    BadD(i64),
    #[error("need at least 3 marked points, got {0}")]
    TooFewMarks(usize),
    #[error("at most {max} marked points are supported, got {n}")]
    TooManyMarks { n: usize, max: usize },
    #[error("block I0 has weight {0} > 1; numbering must satisfy mu(I0) <= 1 <= mu(I1)")]
    NumberingViolation(String),
    #[error("no edge {0}-{1} in tree")]
    NoSuchEdge(usize, usize),
    #[error("partition is not in P-hat(mu): {0}")]
    NotInPHat(String),
    #[error("two-block partitions carry no per-node vanishing orders")]
    TwoBlockHasNoOrders,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid marking {marking} for n = {n}")]
    InvalidMarking { marking: usize, n: usize },
    #[error("class of degree {degree} cannot be multiplied further on M_0,{n} (dimension {dim})")]
    DegreeOverflow { degree: usize, n: usize, dim: usize },
    #[error("integration needs degree {expected}, class has degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("expected {expected} factors, got {found}")]
    FactorCount { expected: usize, found: usize },
    #[error("exceptional divisor is nonzero; top self-intersection on the blow-up is not computable here")]
    ExceptionalDivisorNontrivial,
    #[error("denominator vanishes: {0}")]
    DenominatorVanishes(String),
    #[error("pole hit: {0}")]
    PoleHit(String),
    #[error("bad blocks: {0}")]
    BadBlocks(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("sampling failed after {0} retries")]
    SamplingExhausted(usize),
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
