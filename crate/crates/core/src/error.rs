use thiserror::Error;

use crate::diagram::V;

#[derive(Debug, Error)]
pub enum Error {
    #[error("diagram has {found} vertices, above the oracle bound of {bound}")]
    SizeExceeded { found: usize, bound: usize },

    #[error("malformed diagram: {0}")]
    Malformed(String),

    #[error("precondition violated at vertex {vertex}: {reason}")]
    Precondition { vertex: V, reason: String },

    #[error("vertex {0} is a boundary vertex or touches one")]
    Boundary(V),

    #[error("vertex sets overlap at {0:?}")]
    Overlap(Vec<V>),

    #[error("diagram has open inputs or outputs; only closed diagrams can be evaluated")]
    OpenDiagram,

    #[error("simplification did not converge: {0}")]
    NonConvergentSimplification(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("total weight is zero")]
    DegenerateWeights,

    #[error("cut tree was planned for a different diagram")]
    PlanMismatch,

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
