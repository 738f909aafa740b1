//! Instance and clustering data model: weighted complete graphs with
//! per-vertex size penalties, the clustering cost function, weight-regime
//! validation, and the hard-bound splitting post-process.

use std::fmt;

use thiserror::Error;

/// Upper bound on negative edge weights. `Infinite` is a distinguished
/// value, not a large float: validation skips the `w- <= tau` check and the
/// alpha optimizer switches to its limit closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tau {
    Finite(f64),
    Infinite,
}

impl Tau {
    pub fn is_finite(self) -> bool {
        matches!(self, Tau::Finite(_))
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            Tau::Finite(t) => Some(t),
            Tau::Infinite => None,
        }
    }
}

impl fmt::Display for Tau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tau::Finite(t) => write!(f, "{}", t),
            Tau::Infinite => write!(f, "INF"),
        }
    }
}

/// The pair of nonnegative weights attached to an edge: `plus` is paid when
/// the endpoints are separated, `minus` when they share a cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeight {
    pub plus: f64,
    pub minus: f64,
}

impl EdgeWeight {
    pub fn new(plus: f64, minus: f64) -> Self {
        EdgeWeight { plus, minus }
    }

    /// `(1, 0)`: a positive edge in the unweighted encoding.
    pub fn positive() -> Self {
        EdgeWeight::new(1.0, 0.0)
    }

    /// `(0, 1)`: a negative edge in the unweighted encoding.
    pub fn negative() -> Self {
        EdgeWeight::new(0.0, 1.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InstanceError {
    #[error("instance must have at least one vertex")]
    Empty,
    #[error("vertex {0} out of range for n={1}")]
    VertexOutOfRange(usize, usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("missing edge {{{0}, {1}}}: the graph must be complete")]
    MissingEdge(usize, usize),
    #[error("edge {{{0}, {1}}} has a negative or non-finite weight")]
    BadWeight(usize, usize),
    #[error("mu must list one nonnegative finite penalty per vertex")]
    BadMu,
    #[error("tau must be a finite real >= 1 or INF, got {0}")]
    BadTau(f64),
    #[error("expected {expected} weights for n={n}, got {got}")]
    WeightCount {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("clustering covers {got} vertices, instance has {expected}")]
    VertexSetMismatch { expected: usize, got: usize },
    #[error("clusters must partition 0..n: vertex {0} is missing or repeated")]
    NotAPartition(usize),
}

/// Index of the unordered pair `{u, v}` in a row-major upper-triangular
/// layout over `n` vertices.
pub fn pair_index(n: usize, u: usize, v: usize) -> usize {
    debug_assert!(u != v && u < n && v < n);
    let (a, b) = if u < v { (u, v) } else { (v, u) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// All unordered pairs of `0..n` in canonical (lexicographic) order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |u| (u + 1..n).map(move |v| (u, v)))
}

/// A complete weighted correlation-clustering instance.
///
/// Vertices are ids `0..n-1`. Every unordered pair carries an
/// [`EdgeWeight`]; each vertex carries a penalty `mu_v >= 0` charged per
/// unit of cluster-size overflow beyond `K + 1`.
///
/// All fields are immutable after construction; every operation on an
/// instance is a pure function.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedInstance {
    n: usize,
    weights: Vec<EdgeWeight>,
    mu: Vec<f64>,
    k: usize,
    tau: Tau,
}

impl WeightedInstance {
    /// Build an instance from a pair-indexed weight table (canonical order,
    /// see [`pairs`]).
    pub fn new(
        n: usize,
        k: usize,
        tau: Tau,
        mu: Vec<f64>,
        weights: Vec<EdgeWeight>,
    ) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        if let Tau::Finite(t) = tau {
            if !(t.is_finite() && t >= 1.0) {
                return Err(InstanceError::BadTau(t));
            }
        }
        if mu.len() != n || mu.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(InstanceError::BadMu);
        }
        let expected = n * (n - 1) / 2;
        if weights.len() != expected {
            return Err(InstanceError::WeightCount {
                n,
                expected,
                got: weights.len(),
            });
        }
        for (u, v) in pairs(n) {
            let w = weights[pair_index(n, u, v)];
            let ok = w.plus.is_finite() && w.minus.is_finite() && w.plus >= 0.0 && w.minus >= 0.0;
            if !ok {
                return Err(InstanceError::BadWeight(u, v));
            }
        }
        Ok(WeightedInstance {
            n,
            weights,
            mu,
            k,
            tau,
        })
    }

    /// Build an instance from an explicit edge list; every unordered pair
    /// must appear exactly once (either endpoint order).
    pub fn from_edge_list(
        n: usize,
        k: usize,
        tau: Tau,
        mu: Vec<f64>,
        edges: &[(usize, usize, f64, f64)],
    ) -> Result<Self, InstanceError> {
        if n == 0 {
            return Err(InstanceError::Empty);
        }
        let expected = n * (n - 1) / 2;
        let mut weights = vec![None; expected];
        for &(u, v, plus, minus) in edges {
            if u >= n {
                return Err(InstanceError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(InstanceError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(InstanceError::SelfLoop(u));
            }
            let idx = pair_index(n, u, v);
            if weights[idx].is_some() {
                return Err(InstanceError::DuplicateEdge(u.min(v), u.max(v)));
            }
            weights[idx] = Some(EdgeWeight::new(plus, minus));
        }
        for (u, v) in pairs(n) {
            if weights[pair_index(n, u, v)].is_none() {
                return Err(InstanceError::MissingEdge(u, v));
            }
        }
        let weights = weights.into_iter().map(|w| w.unwrap()).collect();
        WeightedInstance::new(n, k, tau, mu, weights)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn tau(&self) -> Tau {
        self.tau
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn weight(&self, u: usize, v: usize) -> EdgeWeight {
        self.weights[pair_index(self.n, u, v)]
    }

    pub fn num_edges(&self) -> usize {
        self.weights.len()
    }

    /// Check the weight regime required by the LP-rounding analysis:
    /// `w+ <= 1`, `w- <= tau` (skipped for `tau = INF`) and `w+ + w- >= 1`
    /// on every edge.
    pub fn validate_weighted(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (u, v) in pairs(self.n) {
            let w = self.weight(u, v);
            if w.plus > 1.0 {
                violations.push(Violation::PositiveWeightTooLarge {
                    u,
                    v,
                    value: w.plus,
                });
            }
            if let Tau::Finite(t) = self.tau {
                if w.minus > t {
                    violations.push(Violation::NegativeWeightExceedsTau {
                        u,
                        v,
                        value: w.minus,
                        tau: t,
                    });
                }
            }
            if w.plus + w.minus < 1.0 {
                violations.push(Violation::WeightSumBelowOne {
                    u,
                    v,
                    sum: w.plus + w.minus,
                });
            }
        }
        ValidationReport { violations }
    }

    /// Check the unweighted regime required by the pivot algorithms: every
    /// edge is exactly `(1, 0)` or `(0, 1)` and every `mu_v = 1`.
    pub fn validate_unweighted(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (u, v) in pairs(self.n) {
            let w = self.weight(u, v);
            if w != EdgeWeight::positive() && w != EdgeWeight::negative() {
                violations.push(Violation::NotSigned {
                    u,
                    v,
                    plus: w.plus,
                    minus: w.minus,
                });
            }
        }
        for (v, &m) in self.mu.iter().enumerate() {
            if m != 1.0 {
                violations.push(Violation::PenaltyNotOne { v, value: m });
            }
        }
        ValidationReport { violations }
    }

    /// Cost of a clustering: `w+` over between-cluster edges, `w-` over
    /// within-cluster edges, and `(|C| - (K+1)) * sum of mu over C` for every
    /// cluster larger than `K + 1`.
    pub fn clustering_cost(&self, clustering: &Clustering) -> Result<CostBreakdown, InstanceError> {
        if clustering.len() != self.n {
            return Err(InstanceError::VertexSetMismatch {
                expected: self.n,
                got: clustering.len(),
            });
        }
        let mut positive = 0.0;
        let mut negative = 0.0;
        for (u, v) in pairs(self.n) {
            let w = self.weight(u, v);
            if clustering.same_cluster(u, v) {
                negative += w.minus;
            } else {
                positive += w.plus;
            }
        }
        let mut penalty = 0.0;
        for cluster in clustering.clusters() {
            if cluster.len() > self.k + 1 {
                let overflow = (cluster.len() - (self.k + 1)) as f64;
                let mu_sum: f64 = cluster.iter().map(|&v| self.mu[v]).sum();
                penalty += overflow * mu_sum;
            }
        }
        Ok(CostBreakdown::new(positive, negative, penalty))
    }

    /// Split every cluster larger than `K + 1` into full clusters of size
    /// `K + 1` plus one remainder cluster, taking vertices in increasing id
    /// order. Under `mu == 1` and the validated weight regime this never
    /// increases the total cost.
    pub fn split_oversized(&self, clustering: &Clustering) -> Clustering {
        assert_eq!(
            clustering.len(),
            self.n,
            "clustering does not cover the vertex set"
        );
        let cap = self.k + 1;
        let mut assignment = vec![0usize; self.n];
        let mut next = 0;
        for cluster in clustering.clusters() {
            if cluster.len() <= cap {
                for &v in &cluster {
                    assignment[v] = next;
                }
                next += 1;
            } else {
                for chunk in cluster.chunks(cap) {
                    for &v in chunk {
                        assignment[v] = next;
                    }
                    next += 1;
                }
            }
        }
        Clustering::from_assignment(assignment)
    }
}

/// Outcome of [`WeightedInstance::validate_weighted`] /
/// [`WeightedInstance::validate_unweighted`]: a report, not an error.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "ok")
        } else {
            for (i, v) in self.violations.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{}", v)?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PositiveWeightTooLarge {
        u: usize,
        v: usize,
        value: f64,
    },
    NegativeWeightExceedsTau {
        u: usize,
        v: usize,
        value: f64,
        tau: f64,
    },
    WeightSumBelowOne {
        u: usize,
        v: usize,
        sum: f64,
    },
    NotSigned {
        u: usize,
        v: usize,
        plus: f64,
        minus: f64,
    },
    PenaltyNotOne {
        v: usize,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PositiveWeightTooLarge { u, v, value } => {
                write!(f, "edge {{{u}, {v}}}: w+ = {value} violates w+ <= 1")
            }
            Violation::NegativeWeightExceedsTau { u, v, value, tau } => {
                write!(
                    f,
                    "edge {{{u}, {v}}}: w- = {value} violates w- <= tau = {tau}"
                )
            }
            Violation::WeightSumBelowOne { u, v, sum } => {
                write!(
                    f,
                    "edge {{{u}, {v}}}: w+ + w- = {sum} violates w+ + w- >= 1"
                )
            }
            Violation::NotSigned { u, v, plus, minus } => {
                write!(
                    f,
                    "edge {{{u}, {v}}}: ({plus}, {minus}) is neither (1, 0) nor (0, 1)"
                )
            }
            Violation::PenaltyNotOne { v, value } => {
                write!(f, "vertex {v}: mu_v = 1 required, got {value}")
            }
        }
    }
}

/// A partition of the vertex set, stored as vertex -> cluster id with ids
/// dense from 0 in order of first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    assignment: Vec<usize>,
}

impl Clustering {
    /// Canonicalize an arbitrary labeling into dense cluster ids.
    pub fn from_assignment(raw: Vec<usize>) -> Self {
        let mut relabel: Vec<Option<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(raw.len());
        for &label in &raw {
            if label >= relabel.len() {
                relabel.resize(label + 1, None);
            }
            let next = relabel.iter().filter(|r| r.is_some()).count();
            let id = *relabel[label].get_or_insert(next);
            assignment.push(id);
        }
        Clustering { assignment }
    }

    /// Build from explicit clusters, which must partition `0..n`.
    pub fn from_clusters(n: usize, clusters: &[&[usize]]) -> Result<Self, InstanceError> {
        let mut assignment = vec![usize::MAX; n];
        for (id, cluster) in clusters.iter().enumerate() {
            for &v in *cluster {
                if v >= n {
                    return Err(InstanceError::VertexOutOfRange(v, n));
                }
                if assignment[v] != usize::MAX {
                    return Err(InstanceError::NotAPartition(v));
                }
                assignment[v] = id;
            }
        }
        if let Some(v) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(InstanceError::NotAPartition(v));
        }
        Ok(Clustering::from_assignment(assignment))
    }

    pub fn singletons(n: usize) -> Self {
        Clustering {
            assignment: (0..n).collect(),
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Clustering {
            assignment: vec![0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn same_cluster(&self, u: usize, v: usize) -> bool {
        self.assignment[u] == self.assignment[v]
    }

    pub fn num_clusters(&self) -> usize {
        self.assignment.iter().copied().max().map_or(0, |m| m + 1)
    }

    /// Clusters as vertex lists, by cluster id; vertices ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_clusters()];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    pub fn max_cluster_size(&self) -> usize {
        self.clusters().iter().map(|c| c.len()).max().unwrap_or(0)
    }
}

/// The three components of a clustering's cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    pub positive_cost: f64,
    pub negative_cost: f64,
    pub penalty_cost: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn new(positive_cost: f64, negative_cost: f64, penalty_cost: f64) -> Self {
        CostBreakdown {
            positive_cost,
            negative_cost,
            penalty_cost,
            total: positive_cost + negative_cost + penalty_cost,
        }
    }
}
