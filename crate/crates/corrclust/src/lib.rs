//! Weighted correlation clustering with soft or hard cluster-size bounds.
//!
//! The crate covers three ways of producing a clustering of a complete
//! signed or weighted graph, plus the machinery to verify their guarantees
//! at desk scale:
//!
//! * [`lp`] / [`simplex`] — the linear relaxation with per-vertex overflow
//!   variables, solved by an in-repo two-phase dense simplex.
//! * [`rounding`] — alpha-threshold region growing on a feasible LP point,
//!   with the guarantee constant `c_alpha` and the optimizer for `alpha`.
//! * [`pivot`] — randomized pivoting on signed graphs (`cc_pivot`) and its
//!   size-bounded variant via positive-edge removal.
//! * [`oracle`] — exhaustive ground truth over all set partitions, used to
//!   measure empirical approximation ratios.
//!
//! Instances are immutable after construction and every operation is a pure
//! function, so values can be shared freely across threads.

pub mod format;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod pivot;
pub mod rng;
pub mod rounding;
pub mod simplex;

pub use instance::{
    Clustering, CostBreakdown, EdgeWeight, InstanceError, Tau, ValidationReport, Violation,
    WeightedInstance,
};
pub use lp::{LpProblem, LpSolution};
pub use oracle::OracleResult;
pub use pivot::{EdgeSet, Removal, SignedGraph};
pub use rounding::{AlphaPlan, PivotOrder};
pub use simplex::SimplexConfig;
