use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A row whose bits are all fixed has odd parity.
    #[error("row {row} is fully fixed with odd parity")]
    InfeasibleFold { row: usize },

    /// A window row reaches outside the columns the window owns.
    #[error("row {row} has a nonzero at column {col} outside window columns [{left}, {right})")]
    Coverage { row: usize, col: usize, left: usize, right: usize },

    #[error("window {iteration} is infeasible after fixing earlier bits")]
    RelaxAndFixInfeasible { iteration: usize },

    #[error("window {iteration} produced no incumbent within its budget")]
    WindowNoIncumbent { iteration: usize },

    #[error("simplex could not make progress: {0}")]
    NumericalFailure(String),

    #[error("nullspace dimension {0} is too large for enumeration")]
    TooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
