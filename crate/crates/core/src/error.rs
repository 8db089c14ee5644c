use std::fmt;
use std::path::PathBuf;

use crate::dataset::{Construct, Violation};
use crate::features::ModalityCombo;

/// A dataset violation tied to its position in an input file.
#[derive(Debug, Clone, PartialEq)]
pub struct LocatedViolation {
    pub file: String,
    pub line: Option<u64>,
    pub violation: Violation,
}

impl fmt::Display for LocatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "{}:{}: {}", self.file, line, self.violation),
            None => write!(f, "{}: {}", self.file, self.violation),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("missing file {}", .0.display())]
    MissingFile(PathBuf),
    #[error("{}: {source}", .file.display())]
    Io {
        file: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: {source}")]
    Csv {
        file: String,
        line: u64,
        #[source]
        source: csv::Error,
    },
    #[error("{file}: schema error: {message}")]
    Schema { file: String, message: String },
    #[error("{file}:{line}: robot {id:?}: expected {expected} fields, found {found}")]
    Ragged {
        file: String,
        line: u64,
        id: String,
        expected: usize,
        found: usize,
    },
    #[error("{file}:{line}: robot {id:?}: column {column}: cannot parse {value:?} as a number")]
    Unparseable {
        file: String,
        line: u64,
        id: String,
        column: String,
        value: String,
    },
    #[error("{file}:{line}: duplicate id {id:?}")]
    DuplicateId { file: String, line: u64, id: String },
    #[error("{file}:{line}: robot {id:?} has no row in {missing_from}")]
    MissingId {
        id: String,
        file: String,
        line: u64,
        missing_from: String,
    },
    #[error("{file}: {message}")]
    Manifest { file: String, message: String },
    #[error("{} invalid value(s):\n{}", .0.len(), join_lines(.0))]
    Invalid(Vec<LocatedViolation>),
}

fn join_lines<T: fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum SvrError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid hyperparameter: {0}")]
    InvalidHyperParams(String),
    #[error("feature matrix has zero variance; pass an explicit gamma")]
    ZeroVariance,
    #[error(
        "SMO did not converge after {iterations} iterations (max KKT violation {violation:e})"
    )]
    NotConverged { iterations: usize, violation: f64 },
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("invalid fold request: k = {k}, n = {n} (need 2 <= k <= n)")]
    InvalidFolds { n: usize, k: usize },
    #[error("fold plan covers {plan} rows but dataset has {data}")]
    PlanMismatch { plan: usize, data: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty input")]
    Empty,
    #[error("need at least 2 paired observations, got {0}")]
    TooFewPairs(usize),
    #[error("p-value {0} outside [0, 1]")]
    PValueRange(f64),
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("{combo} / {construct} / fold {fold}: {source}")]
    Cell {
        combo: ModalityCombo,
        construct: Construct,
        fold: usize,
        #[source]
        source: SvrError,
    },
    #[error(transparent)]
    Svr(#[from] SvrError),
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ReportError {
    #[error("incomplete results, missing cells: {}", .0.join(", "))]
    Incomplete(Vec<String>),
}
