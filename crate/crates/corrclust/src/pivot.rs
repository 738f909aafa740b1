//! Randomized pivoting on complete signed graphs: `cc_pivot` and its
//! size-bounded variant, which first removes positive edges until every
//! positive degree is at most `K` and then pivots on the reduced graph.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::instance::{pair_index, pairs, Clustering, Tau, ValidationReport, WeightedInstance};
use crate::rng;
use crate::rounding::{Picker, PivotOrder, RoundingError};

/// Candidate-edge cap for the exhaustive removal search.
pub const EXACT_REMOVAL_GUARD: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PivotError {
    #[error("instance is not an unweighted clustering instance:\n{0}")]
    NotUnweighted(ValidationReport),
    #[error("explicit pivot sequence is not a permutation of the vertices")]
    NotAPermutation,
    #[error("{candidates} positive edges touch overloaded vertices, above the exact-search guard of {guard}; use greedy removal")]
    ExactGuardExceeded { candidates: usize, guard: usize },
    #[error("edge set mentions vertex {0}, graph has {1}")]
    EdgeOutOfRange(usize, usize),
}

/// A complete graph with a +/- label on every pair, the unweighted view
/// the pivot algorithms work on.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    positive: Vec<bool>,
    pos_adj: Vec<Vec<usize>>,
}

impl SignedGraph {
    /// Build from a pair-indexed label table (`true` = positive edge).
    pub fn new(n: usize, positive: Vec<bool>) -> Self {
        assert_eq!(positive.len(), n * (n - 1) / 2, "need one label per pair");
        let mut pos_adj = vec![Vec::new(); n];
        for (u, v) in pairs(n) {
            if positive[pair_index(n, u, v)] {
                pos_adj[u].push(v);
                pos_adj[v].push(u);
            }
        }
        SignedGraph {
            n,
            positive,
            pos_adj,
        }
    }

    /// Build from the list of positive pairs; every other pair is negative.
    pub fn from_positive_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut positive = vec![false; n * (n - 1) / 2];
        for &(u, v) in edges {
            positive[pair_index(n, u, v)] = true;
        }
        SignedGraph::new(n, positive)
    }

    /// View a weighted instance as a signed graph; it must pass
    /// `validate_unweighted` (edges exactly (1,0)/(0,1), penalties all 1).
    pub fn from_instance(instance: &WeightedInstance) -> Result<Self, PivotError> {
        let report = instance.validate_unweighted();
        if !report.ok() {
            return Err(PivotError::NotUnweighted(report));
        }
        let positive = pairs(instance.n())
            .map(|(u, v)| instance.weight(u, v).plus == 1.0)
            .collect();
        Ok(SignedGraph::new(instance.n(), positive))
    }

    /// The corresponding unweighted instance with size parameter `k`
    /// (weights (1,0)/(0,1), penalties 1, tau = 1).
    pub fn to_instance(&self, k: usize) -> WeightedInstance {
        let weights = self
            .positive
            .iter()
            .map(|&p| {
                if p {
                    crate::instance::EdgeWeight::positive()
                } else {
                    crate::instance::EdgeWeight::negative()
                }
            })
            .collect();
        WeightedInstance::new(self.n, k, Tau::Finite(1.0), vec![1.0; self.n], weights).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_positive(&self, u: usize, v: usize) -> bool {
        self.positive[pair_index(self.n, u, v)]
    }

    /// `d+(v)`.
    pub fn pos_degree(&self, v: usize) -> usize {
        self.pos_adj[v].len()
    }

    /// `N+(v)` in ascending order.
    pub fn pos_neighbors(&self, v: usize) -> &[usize] {
        &self.pos_adj[v]
    }

    /// `Delta+`: the maximum positive degree.
    pub fn max_pos_degree(&self) -> usize {
        (0..self.n).map(|v| self.pos_degree(v)).max().unwrap_or(0)
    }

    pub fn positive_edges(&self) -> Vec<(usize, usize)> {
        pairs(self.n)
            .filter(|&(u, v)| self.is_positive(u, v))
            .collect()
    }

    /// The reduced graph `H`: positive edges of `self` minus `x` (removed
    /// edges become negative).
    pub fn remove_positive(&self, x: &EdgeSet) -> Result<SignedGraph, PivotError> {
        let mut positive = self.positive.clone();
        for &(u, v) in x.iter() {
            if u >= self.n || v >= self.n {
                return Err(PivotError::EdgeOutOfRange(u.max(v), self.n));
            }
            positive[pair_index(self.n, u, v)] = false;
        }
        Ok(SignedGraph::new(self.n, positive))
    }

    /// Number of disagreements of a clustering: positive edges between
    /// clusters plus negative edges within clusters.
    pub fn disagreements(&self, clustering: &Clustering) -> usize {
        pairs(self.n)
            .filter(|&(u, v)| self.is_positive(u, v) != clustering.same_cluster(u, v))
            .count()
    }
}

/// A set of unordered vertex pairs, kept sorted for deterministic iteration
/// and lexicographic comparison.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSet {
    edges: BTreeSet<(usize, usize)>,
}

impl EdgeSet {
    pub fn new() -> Self {
        EdgeSet::default()
    }

    pub fn from_edges(edges: &[(usize, usize)]) -> Self {
        let mut set = EdgeSet::new();
        for &(u, v) in edges {
            set.insert(u, v);
        }
        set
    }

    pub fn insert(&mut self, u: usize, v: usize) {
        assert_ne!(u, v, "edges join distinct vertices");
        self.edges.insert((u.min(v), u.max(v)));
    }

    pub fn contains(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.edges.iter()
    }

    pub fn as_sorted_vec(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().collect()
    }
}

/// The cc-pivot loop: pick a pivot `v` among the remaining vertices, emit
/// `({v} union N+(v))` restricted to the remaining set, repeat. With
/// `PivotOrder::Seeded` the pivot is uniform over the remaining vertices.
pub fn cc_pivot(graph: &SignedGraph, order: &PivotOrder) -> Result<Clustering, PivotError> {
    let n = graph.n();
    let mut picker = Picker::new(order, n).map_err(|e| match e {
        RoundingError::NotAPermutation => PivotError::NotAPermutation,
        _ => unreachable!("picker construction only fails on bad permutations"),
    })?;
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut assignment = vec![0usize; n];
    let mut next_cluster = 0;
    while remaining > 0 {
        let v = picker.next(&alive);
        assignment[v] = next_cluster;
        alive[v] = false;
        remaining -= 1;
        for &w in graph.pos_neighbors(v) {
            if alive[w] {
                assignment[w] = next_cluster;
                alive[w] = false;
                remaining -= 1;
            }
        }
        next_cluster += 1;
    }
    Ok(Clustering::from_assignment(assignment))
}

/// Positive edges incident to overloaded vertices; only these can appear in
/// a minimum removal set.
fn removal_candidates(graph: &SignedGraph, k: usize) -> Vec<(usize, usize)> {
    graph
        .positive_edges()
        .into_iter()
        .filter(|&(u, v)| graph.pos_degree(u) > k || graph.pos_degree(v) > k)
        .collect()
}

/// Minimum-cardinality set of positive edges whose removal brings every
/// positive degree down to `k`, by exhaustive branch-and-bound over the
/// candidate edges. Ties are broken toward the lexicographically smallest
/// edge list. Guarded: at most [`EXACT_REMOVAL_GUARD`] candidate edges.
pub fn bounded_edge_removal_exact(graph: &SignedGraph, k: usize) -> Result<EdgeSet, PivotError> {
    let candidates = removal_candidates(graph, k);
    if candidates.len() > EXACT_REMOVAL_GUARD {
        return Err(PivotError::ExactGuardExceeded {
            candidates: candidates.len(),
            guard: EXACT_REMOVAL_GUARD,
        });
    }

    let n = graph.n();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (id, &(u, v)) in candidates.iter().enumerate() {
        incident[u].push(id);
        incident[v].push(id);
    }

    // Start from the greedy set: feasible, at most twice the optimum, and a
    // subset of the candidates.
    let greedy = bounded_edge_removal_greedy(graph, k);
    let mut best: Vec<usize> = greedy
        .iter()
        .map(|&(u, v)| {
            candidates
                .iter()
                .position(|&e| e == (u, v))
                .expect("greedy removes only candidate edges")
        })
        .collect();
    best.sort_unstable();

    struct RemovalSearch<'a> {
        candidates: &'a [(usize, usize)],
        incident: &'a [Vec<usize>],
        k: usize,
        deg: Vec<usize>,
        removed: Vec<bool>,
        forbidden: Vec<bool>,
        chosen: Vec<usize>,
        best: Vec<usize>,
    }

    impl RemovalSearch<'_> {
        fn dfs(&mut self) {
            let Some(v) = self.deg.iter().position(|&d| d > self.k) else {
                let mut sorted = self.chosen.clone();
                sorted.sort_unstable();
                if sorted.len() < self.best.len()
                    || (sorted.len() == self.best.len() && sorted < self.best)
                {
                    self.best = sorted;
                }
                return;
            };

            // Each removal fixes at most two units of excess.
            let excess: usize = self.deg.iter().map(|&d| d.saturating_sub(self.k)).sum();
            if self.chosen.len() + excess.div_ceil(2) > self.best.len() {
                return;
            }
            // A vertex whose removable incident edges cannot cover its
            // excess makes the branch infeasible.
            for u in 0..self.deg.len() {
                if self.deg[u] > self.k {
                    let removable = self.incident[u]
                        .iter()
                        .filter(|&&e| !self.removed[e] && !self.forbidden[e])
                        .count();
                    if removable < self.deg[u] - self.k {
                        return;
                    }
                }
            }

            // Branch on the first removed edge at v among its removable
            // ones: branch i removes edge e_i and forbids e_0..e_{i-1}.
            let branches: Vec<usize> = self.incident[v]
                .iter()
                .copied()
                .filter(|&e| !self.removed[e] && !self.forbidden[e])
                .collect();
            for &e in &branches {
                let (a, b) = self.candidates[e];
                self.removed[e] = true;
                self.deg[a] -= 1;
                self.deg[b] -= 1;
                self.chosen.push(e);
                self.dfs();
                self.chosen.pop();
                self.deg[a] += 1;
                self.deg[b] += 1;
                self.removed[e] = false;
                self.forbidden[e] = true;
            }
            for &e in &branches {
                self.forbidden[e] = false;
            }
        }
    }

    let mut search = RemovalSearch {
        candidates: &candidates,
        incident: &incident,
        k,
        deg: (0..n).map(|v| graph.pos_degree(v)).collect(),
        removed: vec![false; candidates.len()],
        forbidden: vec![false; candidates.len()],
        chosen: Vec::new(),
        best,
    };
    search.dfs();
    Ok(EdgeSet::from_edges(
        &search
            .best
            .iter()
            .map(|&e| candidates[e])
            .collect::<Vec<_>>(),
    ))
}

fn greedy_removal(
    graph: &SignedGraph,
    k: usize,
    mut pick: impl FnMut(&[usize], usize) -> Vec<usize>,
) -> EdgeSet {
    let n = graph.n();
    let num_pairs = n * (n - 1) / 2;
    let mut keeps = vec![0u8; num_pairs];
    for v in 0..n {
        let neighbors = graph.pos_neighbors(v);
        let kept = if neighbors.len() <= k {
            neighbors.to_vec()
        } else {
            pick(neighbors, k)
        };
        for w in kept {
            keeps[pair_index(n, v, w)] += 1;
        }
    }
    let mut x = EdgeSet::new();
    for (u, v) in pairs(n) {
        if graph.is_positive(u, v) && keeps[pair_index(n, u, v)] < 2 {
            x.insert(u, v);
        }
    }
    x
}

/// The 2-approximate removal: every vertex keeps its `k` positive edges
/// toward lowest-indexed neighbors; an edge survives only if both endpoints
/// keep it. `|X| <= sum_v max(0, d+(v) - k) <= 2 |X_min|`.
pub fn bounded_edge_removal_greedy(graph: &SignedGraph, k: usize) -> EdgeSet {
    greedy_removal(graph, k, |neighbors, k| neighbors[..k].to_vec())
}

/// Greedy removal where each vertex keeps a seeded-random `k`-subset of its
/// positive neighbors instead of the lowest-indexed ones.
pub fn bounded_edge_removal_greedy_seeded(graph: &SignedGraph, k: usize, seed: u64) -> EdgeSet {
    let mut rng = rng::seeded(seed);
    greedy_removal(graph, k, move |neighbors, k| {
        let mut pool = neighbors.to_vec();
        // Partial Fisher-Yates: the first k entries become the sample.
        for i in 0..k {
            let j = i + rng::uniform_index(&mut rng, pool.len() - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    })
}

/// Which edge-removal strategy `bounded_cc_pivot` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Removal {
    Exact,
    Greedy,
}

/// Size-bounded pivoting: remove positive edges until `d+ <= K`, then run
/// `cc_pivot` on the reduced graph. Every emitted cluster has size at most
/// `K + 1` because a pivot cluster never exceeds `d+(pivot) + 1`.
pub fn bounded_cc_pivot(
    graph: &SignedGraph,
    k: usize,
    removal: Removal,
    order: &PivotOrder,
) -> Result<Clustering, PivotError> {
    let x = match removal {
        Removal::Exact => bounded_edge_removal_exact(graph, k)?,
        Removal::Greedy => bounded_edge_removal_greedy(graph, k),
    };
    let reduced = graph.remove_positive(&x)?;
    debug_assert!(reduced.max_pos_degree() <= k);
    let clustering = cc_pivot(&reduced, order)?;
    debug_assert!(clustering.max_cluster_size() <= k + 1);
    Ok(clustering)
}
