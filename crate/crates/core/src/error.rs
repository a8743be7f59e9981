use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("view distance needs at least 2 coordinates, got {0}")]
    TooFewDimensions(usize),

    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("zero baseline norm: similarity gain is undefined")]
    ZeroNorm,

    #[error("baseline vector must end in 0, found {0}")]
    NonZeroBaseline(f64),

    #[error("invalid grid specification: {0}")]
    InvalidGrid(String),

    #[error("matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },

    #[error("matrix is not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },

    #[error("eigensolver did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("requested {k} clusters/neighbours but only {n} points are available")]
    TooFewPoints { k: usize, n: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("label length {labels} does not match {points} points")]
    LengthMismatch { labels: usize, points: usize },

    #[error("dataset has no labels")]
    Unlabeled,

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("too many distinct labels for assignment: {0} (max 64)")]
    TooManyLabels(usize),

    #[error("{path}: row {row} has {found} fields, expected {expected}")]
    RaggedRow {
        path: String,
        row: usize,
        found: usize,
        expected: usize,
    },

    #[error("{path}: cell (row {row}, column {col}) is not a number: {value:?}")]
    BadCell {
        path: String,
        row: usize,
        col: usize,
        value: String,
    },

    #[error("{path}: column {column} not found")]
    NoSuchColumn { path: String, column: String },

    #[error("dataset {name} does not match manifest: {detail}")]
    Manifest { name: String, detail: String },

    #[error("{path}: {source}")]
    Open {
        path: String,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerical routines themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence(_))
    }
}
