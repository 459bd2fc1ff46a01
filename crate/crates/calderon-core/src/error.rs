//! Error type shared across the laboratory.

use thiserror::Error;

/// Errors produced by grid operations, kernel builders, and checkers.
#[derive(Debug, Error)]
pub enum LabError {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("non-finite value encountered in {context} (index {index})")]
    NonFinite { context: &'static str, index: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dyadic index {j} outside resolvable range [{j_min}, {j_max}]")]
    UnresolvableScale { j: i32, j_min: i32, j_max: i32 },

    #[error("direct summation limited to n <= {max_n} points per axis, got {n}")]
    GridTooLarge { n: usize, max_n: usize },

    #[error("empty parameter set: {0}")]
    EmptyParameters(String),

    #[error("moment system for k = {k} is singular or unsupported")]
    MomentSystem { k: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, LabError>;
