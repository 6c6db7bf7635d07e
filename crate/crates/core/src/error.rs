use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 2..=8")]
    DimensionOutOfRange(usize),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("frame index {index} out of range for dimension {n}")]
    FrameIndex { index: usize, n: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("metric at node {node} is not positive definite")]
    NotPositiveDefinite { node: usize },

    #[error("metric at node {node} is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { node: usize, asymmetry: f64 },

    #[error("insufficient grid resolution: axis {axis} has {nodes} nodes, need at least 5")]
    InsufficientResolution { axis: usize, nodes: usize },

    #[error("grid file: {0}")]
    GridFormat(String),

    #[error("Weyl tensor is undefined in dimension {0}")]
    WeylUndefined(usize),

    #[error("{what} is not {claim}: residual {residual:.3e}")]
    Symmetry {
        what: &'static str,
        claim: &'static str,
        residual: f64,
    },

    #[error("eigen decomposition residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    EigenResidual { residual: f64, tolerance: f64 },

    #[error("empty sample set")]
    EmptySamples,

    #[error("product spectrum needs an even-dimensional factor (got dimensions {0} and {1})")]
    OddProduct(usize, usize),

    #[error("cannot read `{path}`: {message}")]
    Io { path: String, message: String },

    #[error("missing derivative data")]
    MissingDerivatives,
}

pub type Result<T> = std::result::Result<T, Error>;
