use std::io;

/// Errors produced by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid scenario set: {0}")]
    InvalidScenarios(String),
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("target node {target} is unreachable from source node {from}")]
    Unreachable { from: usize, target: usize },
    #[error("the feasible set cannot be enumerated by this oracle")]
    EnumerationUnsupported,
    #[error("enumeration exceeded the cap of {cap} solutions")]
    EnumerationCapExceeded { cap: usize },
    #[error("{what} is too large: {value} exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("weights must be non-increasing for {0}")]
    WeightsNotNonIncreasing(&'static str),
    #[error("weights are not risk-affine with at most {0} non-zero entries")]
    NotRiskAffine(usize),
    #[error("weights are neither non-increasing nor non-decreasing")]
    NotMonotone,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("LP parse error on line {line}: {message}")]
    LpParse { line: usize, message: String },
    #[error("{pending} exported model(s) in {dir} await solutions from an external solver")]
    AwaitingExternal { pending: usize, dir: String },
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        })
    }
}
