//! Semidefinite programs over operators with maximally mixed marginals, and
//! the witness ordering problem.

pub mod ordering;
pub mod overlap;

pub use ordering::{
    ordering_sdp, witness_weaker_than, OrderingOptions, OrderingVerdict, ORDERING_TOLERANCE,
};
pub use overlap::{
    max_overlap_operator, nearest_max_entangled, obs3_verdict, project_marginals, sdp_max_overlap,
    OverlapConclusion, OverlapVerdict, SdpOptions, SdpSolution, SdpStatus, PURITY_THRESHOLD,
};
