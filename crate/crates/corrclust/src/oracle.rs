//! Brute-force ground truth: the optimal (penalized or hard-bounded)
//! clustering by exhaustive enumeration of set partitions, plus the
//! Monte-Carlo harness that measures empirical approximation ratios of the
//! randomized pivot algorithms against it.

use thiserror::Error;

use crate::instance::{Clustering, CostBreakdown, WeightedInstance};
use crate::pivot::{bounded_cc_pivot, cc_pivot, PivotError, Removal, SignedGraph};
use crate::rng;
use crate::rounding::PivotOrder;

/// Default cap on the vertex count for exhaustive enumeration; Bell(12) is
/// about 4.2 million partitions.
pub const DEFAULT_GUARD_N: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("n = {n} exceeds the enumeration guard of {guard} vertices")]
    TooLarge { n: usize, guard: usize },
    #[error(transparent)]
    Pivot(#[from] PivotError),
}

/// The optimum found by enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_clustering: Clustering,
    pub best_cost: CostBreakdown,
    /// Complete partitions evaluated (Bell(n) in the unconstrained case).
    pub partitions_examined: u64,
}

/// Enumerate every set partition in restricted-growth-string order and
/// return the cheapest. With `hard_bound`, partitions containing a cluster
/// larger than `K + 1` are skipped (pruned as soon as a block overflows);
/// penalties are zero on the survivors. Ties keep the lexicographically
/// first string.
pub fn optimal_clustering(
    instance: &WeightedInstance,
    hard_bound: bool,
) -> Result<OracleResult, OracleError> {
    optimal_clustering_with_guard(instance, hard_bound, DEFAULT_GUARD_N)
}

/// [`optimal_clustering`] with a caller-chosen guard, at the caller's risk.
pub fn optimal_clustering_with_guard(
    instance: &WeightedInstance,
    hard_bound: bool,
    guard_n: usize,
) -> Result<OracleResult, OracleError> {
    let n = instance.n();
    if n > guard_n {
        return Err(OracleError::TooLarge { n, guard: guard_n });
    }

    struct Enumeration<'a> {
        instance: &'a WeightedInstance,
        cap: usize,
        rgs: Vec<usize>,
        sizes: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        examined: u64,
    }

    impl Enumeration<'_> {
        fn descend(&mut self, depth: usize, max_block: usize) {
            let n = self.instance.n();
            if depth == n {
                self.examined += 1;
                let clustering = Clustering::from_assignment(self.rgs.clone());
                let total = self
                    .instance
                    .clustering_cost(&clustering)
                    .expect("enumerated assignments cover the vertex set")
                    .total;
                // Strict improvement keeps the lexicographically first string.
                if self.best.as_ref().is_none_or(|(b, _)| total < *b) {
                    self.best = Some((total, self.rgs.clone()));
                }
                return;
            }
            for block in 0..=max_block {
                if self.sizes[block] + 1 > self.cap {
                    continue;
                }
                self.rgs[depth] = block;
                self.sizes[block] += 1;
                self.descend(depth + 1, max_block.max(block + 1).min(n - 1));
                self.sizes[block] -= 1;
            }
        }
    }

    let mut search = Enumeration {
        instance,
        cap: if hard_bound {
            instance.k() + 1
        } else {
            usize::MAX
        },
        rgs: vec![0; n],
        sizes: vec![0; n],
        best: None,
        examined: 0,
    };
    search.descend(0, 0);
    let examined = search.examined;
    let (_, assignment) = search
        .best
        .expect("singletons always satisfy the size bound");
    let best_clustering = Clustering::from_assignment(assignment);
    let best_cost = instance.clustering_cost(&best_clustering).unwrap();
    Ok(OracleResult {
        best_clustering,
        best_cost,
        partitions_examined: examined,
    })
}

/// Ratio of an achieved cost against the oracle optimum. When the optimum
/// is zero the ratio is 1 for a zero-cost run and +inf otherwise; harnesses
/// exclude opt = 0 instances from ratio statistics.
pub fn cost_ratio(cost: f64, opt: f64) -> f64 {
    if opt == 0.0 {
        if cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        cost / opt
    }
}

/// Which randomized clustering algorithm a Monte-Carlo run drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRun {
    CcPivot,
    Bounded { k: usize, removal: Removal },
}

/// Per-batch cost and ratio statistics against the enumerated optimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub trials: u64,
    pub mean_cost: f64,
    pub max_cost: f64,
    pub opt_cost: f64,
    pub mean_ratio: f64,
    pub max_ratio: f64,
}

/// Run the selected algorithm `trials` times (trial `i` is seeded with
/// `seed + i`) and report cost/ratio statistics against the brute-force
/// optimum: the unconstrained optimum for `CcPivot`, the hard-bounded one
/// for `Bounded`.
pub fn empirical_ratio(
    graph: &SignedGraph,
    run: PivotRun,
    trials: u64,
    seed: u64,
    guard_n: usize,
) -> Result<RatioStats, OracleError> {
    assert!(trials > 0, "need at least one trial");
    let opt = match run {
        PivotRun::CcPivot => {
            optimal_clustering_with_guard(&graph.to_instance(graph.n()), false, guard_n)?
        }
        PivotRun::Bounded { k, .. } => {
            optimal_clustering_with_guard(&graph.to_instance(k), true, guard_n)?
        }
    };
    let opt_cost = opt.best_cost.total;

    let mut sum_cost = 0.0;
    let mut max_cost = 0.0_f64;
    let mut sum_ratio = 0.0;
    let mut max_ratio = 0.0_f64;
    for i in 0..trials {
        let order = PivotOrder::Seeded(rng::trial_seed(seed, i));
        let clustering = match run {
            PivotRun::CcPivot => cc_pivot(graph, &order)?,
            PivotRun::Bounded { k, removal } => bounded_cc_pivot(graph, k, removal, &order)?,
        };
        let cost = graph.disagreements(&clustering) as f64;
        let ratio = cost_ratio(cost, opt_cost);
        sum_cost += cost;
        max_cost = max_cost.max(cost);
        sum_ratio += ratio;
        max_ratio = max_ratio.max(ratio);
    }
    Ok(RatioStats {
        trials,
        mean_cost: sum_cost / trials as f64,
        max_cost,
        opt_cost,
        mean_ratio: sum_ratio / trials as f64,
        max_ratio,
    })
}
