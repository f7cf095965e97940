use thiserror::Error;

use crate::hierarchy::GammaNode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown metric `{0}` (expected euclidean, manhattan or chebyshev)")]
    UnknownMetric(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("points must have at least one coordinate")]
    ZeroDimension,

    #[error("row {row} has {found} coordinates, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row}, column {column}: {reason}")]
    BadValue {
        row: usize,
        column: usize,
        reason: String,
    },

    #[error("rows {first} and {second} are the same point")]
    DuplicatePoint { first: usize, second: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tuple size {needed} exceeds cloud size {available}")]
    TupleTooLarge { needed: usize, available: usize },

    #[error("point {0} of the smaller cloud does not occur in the larger cloud")]
    NotNested(usize),

    #[error("radius {r} does not exceed the configuration distance {config}")]
    RadiusTooSmall { r: f64, config: f64 },

    #[error("node (scale index {}, label {}) is not in the tree", .0.scale_index, .0.label)]
    InvalidNode(GammaNode),

    #[error("node (scale index {}, label {}) is not a branch point", .0.scale_index, .0.label)]
    NotBranchPoint(GammaNode),

    #[error("no branch point lies below node (scale index {}, label {})", .0.scale_index, .0.label)]
    NoBranchBelow(GammaNode),

    #[error("nodes have no common upper bound")]
    NoUpperBound,

    #[error("scale index {0} is out of range")]
    ScaleOutOfRange(usize),

    #[error("slice at scale index {0} has no components")]
    EmptySlice(usize),

    #[error(
        "no injective assignment of {subset:?} within radius {r} at scale {scale} \
         (best bottleneck {bottleneck}, Hall violator {violator:?})"
    )]
    WitnessUnavailable {
        scale: f64,
        r: f64,
        subset: Vec<usize>,
        bottleneck: f64,
        violator: Vec<usize>,
    },

    #[error("malformed tree document: {0}")]
    MalformedTree(String),

    #[error("invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures caused by the input data rather than by how the
    /// library was called.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::EmptyCloud
                | Error::ZeroDimension
                | Error::RaggedRow { .. }
                | Error::BadValue { .. }
                | Error::DuplicatePoint { .. }
                | Error::DimensionMismatch { .. }
                | Error::NotNested(_)
                | Error::EmptySlice(_)
                | Error::MalformedTree(_)
                | Error::Io(_)
                | Error::Csv(_)
                | Error::Json(_)
        )
    }
}
