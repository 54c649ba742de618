use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error("response column `{0}` not found in header")]
    MissingResponse(String),

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("column {0} has an empty name")]
    EmptyColumnName(usize),

    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("row {row}, column `{column}`: value is not finite")]
    NonFinite { row: usize, column: String },

    #[error("row {row} has {found} fields, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },

    #[error("need n > p + 1 observations for a full-model error estimate (n = {n}, p = {p})")]
    TooFewRows { n: usize, p: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("predictor index {index} out of range (p = {p})")]
    IndexOutOfRange { index: usize, p: usize },

    #[error("predictor `{0}` is already in the active set")]
    AlreadyActive(String),

    #[error("design is rank deficient at column `{column}`")]
    RankDeficient { column: String },

    #[error("predictor `{0}` is collinear with the active set")]
    Collinear(String),

    #[error("every remaining predictor is collinear with the active set")]
    AllCollinear,

    #[error("residual standard error is zero: response lies in the column span")]
    DegenerateSigma,

    #[error("{0}")]
    InvalidArgument(String),

    #[error("knot {0} has no successor knot")]
    NoSuccessorKnot(usize),

    #[error("gave up after {attempts} degenerate draws ({what})")]
    TooManyRedraws { what: &'static str, attempts: usize },
}
