use thiserror::Error;

use crate::boxopt::BoundingTable;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis index {index} out of range for {count} basis functions")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("evaluation point {0} lies outside the reference interval [-1, 1]")]
    OutsideReference(f64),

    #[error("polynomial order must be at least 1, got {0}")]
    InvalidOrder(usize),

    #[error("a node set needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("node kind `{0}` cannot be generated without optimization")]
    UnsupportedNodeKind(String),

    #[error("unknown {what} `{value}`")]
    UnknownName { what: &'static str, value: String },

    #[error("invalid node set: {0}")]
    InvalidNodeSet(String),

    #[error("order mismatch: source has order {source_order}, target has order {target_order}")]
    OrderMismatch { source_order: usize, target_order: usize },

    #[error("basis transform is singular")]
    SingularTransform,

    #[error("basis mismatch: expected {expected}, found {found}")]
    BasisMismatch { expected: String, found: String },

    #[error("unsupported dimension {0} (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("expected {expected} coefficients, found {found}")]
    CoefficientCount { expected: usize, found: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("quadratic program is infeasible")]
    Infeasible,

    #[error("optimizer did not converge after {iterations} iterations (best max violation {max_violation:e})")]
    NonConvergence {
        iterations: usize,
        max_violation: f64,
        best: Option<Box<BoundingTable>>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("table failed verification: max violation {0:e}")]
    VerificationFailed(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty or degenerate subcell")]
    EmptySubcell,

    #[error("geometric order {0} exceeds the supported maximum of 8")]
    OrderOverflow(usize),

    #[error("element mean {mean} lies outside the admissible interval [{lower}, {upper}]")]
    MeanOutOfBounds { mean: f64, lower: f64, upper: f64 },

    #[error("time step {dt:e} exceeds the CFL limit {limit:e}")]
    CflViolation { dt: f64, limit: f64 },

    #[error("element {element}: {message}")]
    Element { element: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
