use thiserror::Error;

use crate::tree::NodeId;

/// Errors raised by the fault-tree, dataset and learning operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FtError {
    #[error("no value assigned to basic event `{0}`")]
    MissingAssignment(NodeId),

    #[error("fault tree references variable `{0}` which is not a dataset variable")]
    UnknownVariable(NodeId),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("capacity exceeded: {what} ({actual} > {limit})")]
    Capacity {
        what: &'static str,
        actual: usize,
        limit: usize,
    },

    #[error("invalid fault tree: {0}")]
    InvalidTree(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Data(#[from] DataError),
}

/// Failure to read the Galileo-style tree format.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{line}:1: duplicate definition of `{name}`")]
    Duplicate { line: usize, name: String },
    #[error("{line}:1: `{name}` is referenced but never defined")]
    UndefinedReference { line: usize, name: String },
    #[error("cycle through `{name}`")]
    Cycle { name: String },
    #[error("`{name}` is not reachable from the top event")]
    Unreachable { name: String },
    #[error("missing `toplevel` statement")]
    MissingToplevel,
}

/// Failure to ingest or transform observational data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("line {line}, column `{column}`: cell `{value}` is not 0 or 1")]
    NonBooleanCell {
        line: usize,
        column: String,
        value: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: invalid count `{value}`")]
    InvalidCount { line: usize, value: String },
    #[error("top variable `{0}` is not a column of the dataset")]
    UnknownTop(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("dataset has no records")]
    Empty,
    #[error("malformed csv: {0}")]
    Csv(String),
    #[error("need at least {needed} distinct records, found {found}")]
    TooFewRecords { needed: usize, found: usize },
}

pub type Result<T, E = FtError> = std::result::Result<T, E>;
