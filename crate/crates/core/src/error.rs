use std::path::PathBuf;

use thiserror::Error;

use crate::torus::Field;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("measure has {0} atoms on one side; exhaustive enumeration supports at most {1}")]
    TooManyAtoms(usize, usize),

    #[error("no atoms in [0, 1]")]
    NoPositiveAtoms,

    #[error("negative-circulation atoms present; operation requires supp P in [0, 1]")]
    NegativeAtoms,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("grid mismatch: expected {expected}x{expected}, got {got} values")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("right-hand side has nonzero mean {0:e}")]
    NonZeroMean(f64),

    #[error("exponential overflow in log-partition (alpha * max v = {0})")]
    Overflow(f64),

    #[error("line search failed after {iterations} iterations (step underflow)")]
    Diverged { iterations: usize, last: Box<Field> },

    #[error("lambda schedule refused: {0}")]
    ScheduleRefused(String),

    #[error("point {0:?} is not the argmax of the field")]
    NotArgmax((usize, usize)),

    #[error("no usable peak: {0}")]
    NoPeak(String),

    #[error("too few samples in fit window: {0} (need at least {1})")]
    TooFewSamples(usize, usize),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("tail not integrable: {0}")]
    NonIntegrableTail(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
