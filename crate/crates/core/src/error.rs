use thiserror::Error;

use crate::carrier::Atom;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseError {
    pub(crate) fn new(input: &str, reason: &'static str) -> Self {
        ParseError {
            input: input.to_string(),
            reason,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("atom {0} appears more than once")]
    DuplicatePoint(Atom),
    #[error("a cycle must have zero or at least two points")]
    SinglePoint,
    #[error("map is not a bijection on its support")]
    NotBijective,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("blocks overlap at atom {0}")]
    OverlappingBlocks(Atom),
    #[error("{what} = {value} exceeds the supported range (max {max})")]
    OutOfRange {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("{classes} classes exceeds the enumeration budget of {cap}")]
    BudgetExceeded { classes: usize, cap: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableauError {
    #[error("need m >= n + 2, got n = {n}, m = {m}")]
    BadParameters { n: usize, m: usize },
    #[error("permutation moves {got} points, expected {expected}")]
    WrongMovSize { expected: usize, got: usize },
    #[error("permutation is not in the image of the encoder: {0}")]
    NotInImage(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("{0}")]
    InvalidArgument(&'static str),
    #[error("{what} = {value} is beyond the feasible limit of {limit}")]
    Infeasible {
        what: &'static str,
        value: u128,
        limit: u128,
    },
    #[error("steps must be at least 1")]
    NoSteps,
    #[error("oracle answered {input} with {first} and later with {second}")]
    InconsistentOracle {
        input: String,
        first: String,
        second: String,
    },
    #[error("oracle value {value} lies outside the declared codomain: {reason}")]
    OutOfCodomain { value: String, reason: String },
    #[error(transparent)]
    Partition(#[from] PartitionError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProbeError {
    #[error("carrier of {0} atoms exceeds the exhaustive scan guard of 8")]
    CarrierTooLarge(usize),
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}
