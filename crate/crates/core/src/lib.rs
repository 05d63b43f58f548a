//! Qualitative shape descriptors for silhouette matching.
//!
//! Binary masks are traced to polygon outlines, simplified by discrete curve
//! evolution and described by eOPRA-m relations between every pair of
//! vertices: a direction sector and a distance class. Descriptors are compared
//! under cyclic relabelling, weighted corpus-wide, and can be turned back into
//! prototype polygons by tracing plus greedy refinement.

pub mod corpus;
pub mod dce;
pub mod descriptor;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod outline;
pub mod reconstruct;
pub mod render;
pub mod similarity;
pub mod synthetic;

pub use corpus::{
    build_corpus, compare_all, report_queries, CorpusConfig, CorpusEntry, CorpusReport,
};
pub use dce::{relevance, simplify};
pub use descriptor::{describe, QualShape};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{validate_polygon, Point, SimplePolygon};
pub use outline::{load_mask, trace_largest_boundary, BinaryMask};
pub use reconstruct::{greedy_refine, mismatch_score, reconstruct, trace_prototype, SearchParams};
pub use similarity::{
    best_alignment, compare_shapes, compute_weights, ErrorMatrix, PairComparison, Weights,
};
