//! Degree-Rips component hierarchies and their branch-point trees for finite
//! metric data sets.
//!
//! For a density `k` and scale `s`, the degree-Rips complex `L(s, k)` keeps
//! the points with at least `k` other points within distance `s`, joined by
//! edges of length at most `s`. Its path components, tracked across all
//! phase-change scales, form the hierarchy [`GammaTree`] (the tree HDBSCAN
//! works with). Merges and births of components are its branch points
//! ([`BranchTree`]), and every node retracts to the maximal branch point
//! below it.
//!
//! For nested data sets `X ⊆ Y` whose distinct-tuple configuration spaces
//! are within Hausdorff distance `r`, the branch-point trees are interleaved
//! with shift `2r`; [`verify_interleaving`] checks all the order relations
//! involved on a concrete pair.
//!
//! ```
//! use branchpoint::{build_gamma, extract_branch_points, DistanceMatrix, Metric, PointCloud};
//!
//! let cloud = PointCloud::from_line(&[0.0, 1.0, 3.0]).unwrap();
//! let dm = DistanceMatrix::new(&cloud, Metric::Euclidean);
//! let tree = build_gamma(&dm, 0);
//! let branches = extract_branch_points(&tree);
//! assert_eq!(branches.len(), 5);
//! ```

// `!(a <= b)` is used on purpose so that NaN fails the comparison
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod branch;
pub mod error;
pub mod exec;
pub mod gen;
pub mod hierarchy;
pub mod metric;
pub mod rips;
pub mod stability;

pub use branch::{
    extract_branch_points, extract_branch_points_with, BranchCondition, BranchOptions, BranchPoint,
    BranchTree, BranchTreeDoc, RetractionReport,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use hierarchy::{
    build_gamma, build_gamma_with, GammaNode, GammaTree, GammaTreeDoc, UltrametricSlice,
};
pub use metric::{
    bottleneck_inject, config_hausdorff_distance, distance_matrix, hausdorff_distance,
    phase_change_scales, phase_change_scales_merged, CrossDistances, DistanceMatrix, Metric,
    PointCloud, ScaleGrid, SubsetWitness,
};
pub use rips::{components_at, vertex_set, Partition, VertexSet};
pub use stability::{
    induced_map_i, induced_map_sigma, induced_map_theta, theta_vertex_map, verify_interleaving,
    verify_interleaving_with, InterleavingReport, NestedPair, PosetMap, ThetaMap,
};
