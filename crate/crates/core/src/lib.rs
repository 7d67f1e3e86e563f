//! Classifier adjacency from detection scores.
//!
//! Two classifiers evaluated on the same trials are compared through the
//! order in which they rank those trials: a tie-corrected Kendall tau is
//! mapped to a distance in `[0, 1]`, and the resulting distance matrix is
//! embedded in the plane with classical or non-metric multidimensional
//! scaling. Detection metrics (DET, EER, Cllr, min-Cllr) are provided for
//! annotating the resulting maps.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and parallel drivers live in the `adjviz` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adjacency;
pub mod detmetrics;
pub mod embedding;
mod error;
pub mod isotonic;
pub mod linalg;
pub mod ranking;
pub mod scores;

pub use adjacency::{distance_matrix, tau_to_distance, DistanceMatrix};
pub use detmetrics::{cllr, det_curve, eer, min_cllr, pav_rank_groups, DetCurve, OperatingPoint};
pub use embedding::{
    classical_mds, nonmetric_mds, procrustes_align, procrustes_normalize, Embedding, MdsMethod,
    NonMetricConfig,
};
pub use error::{Error, Result};
pub use isotonic::{isotonic_regression, IsotonicFit};
pub use ranking::{
    kendall_tau_fast, kendall_tau_naive, kendall_tau_ranked, RankedColumn, TauResult, TauStats,
};
pub use scores::{group_reduce, ClassifierMetadata, GroupMap, LabelMap, ScoreMatrix};
