//! The linear relaxation of the size-bounded clustering problem: distance
//! variables `x_e` per unordered pair, overflow variables `y_v` per vertex,
//! triangle rows, and per-vertex size rows.

use std::fmt;

use thiserror::Error;

use crate::instance::{pair_index, pairs, Clustering, ValidationReport, WeightedInstance};

/// Default absolute tolerance for feasibility checks.
pub const DEFAULT_FEAS_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
}

impl fmt::Display for Rel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rel::Le => write!(f, "<="),
            Rel::Ge => write!(f, ">="),
        }
    }
}

/// Provenance of a constraint row, for diagnostics and the text dump.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    /// `x_uv <= x_uz + x_zv` with `z` the middle vertex.
    Triangle { u: usize, v: usize, z: usize },
    /// `-sum_{v != u} x_uv - y_u <= K - (n - 1)`, the rewritten form of
    /// `sum_{v != u} (1 - x_uv) <= K + y_u`.
    Size { u: usize },
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rel: Rel,
    pub rhs: f64,
    pub kind: RowKind,
}

/// The materialized linear program for one instance.
#[derive(Debug, Clone)]
pub struct LpProblem {
    n: usize,
    num_x: usize,
    num_y: usize,
    /// Minimization coefficients: `w+ - w-` on x variables, `mu_v` on y.
    pub objective: Vec<f64>,
    /// `sum_e w-_e`, folded out of the objective vector; adding it back
    /// makes the optimum equal the clustering cost expression.
    pub objective_constant: f64,
    pub rows: Vec<LpRow>,
    /// Per-variable `[lo, hi]`; `hi = f64::INFINITY` for y variables.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn num_y(&self) -> usize {
        self.num_y
    }

    pub fn num_vars(&self) -> usize {
        self.num_x + self.num_y
    }

    pub fn x_index(&self, u: usize, v: usize) -> usize {
        pair_index(self.n, u, v)
    }

    pub fn y_index(&self, v: usize) -> usize {
        self.num_x + v
    }

    pub fn var_name(&self, i: usize) -> String {
        if i < self.num_x {
            let (u, v) = pairs(self.n).nth(i).unwrap();
            format!("x_{}_{}", u, v)
        } else {
            format!("y_{}", i - self.num_x)
        }
    }

    /// Plain-text row-per-line dump for cross-checking against an external
    /// solver. Informational only; nothing in the crate parses it back.
    pub fn dump(&self) -> String {
        use std::fmt::Write;

        let term = |i: usize, c: f64| format!("{:+} {}", c, self.var_name(i));
        let mut out = String::new();
        let obj: Vec<String> = self
            .objective
            .iter()
            .enumerate()
            .map(|(i, &c)| term(i, c))
            .collect();
        writeln!(
            out,
            "minimize {} {:+}",
            obj.join(" "),
            self.objective_constant
        )
        .unwrap();
        writeln!(out, "subject to").unwrap();
        for row in &self.rows {
            let lhs: Vec<String> = row.coeffs.iter().map(|&(i, c)| term(i, c)).collect();
            writeln!(out, "  {} {} {}", lhs.join(" "), row.rel, row.rhs).unwrap();
        }
        writeln!(out, "bounds").unwrap();
        for (i, &(lo, hi)) in self.bounds.iter().enumerate() {
            if hi.is_finite() {
                writeln!(out, "  {} <= {} <= {}", lo, self.var_name(i), hi).unwrap();
            } else {
                writeln!(out, "  {} <= {}", lo, self.var_name(i)).unwrap();
            }
        }
        out
    }
}

/// A (not necessarily feasible) assignment to the LP variables.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn x_of(&self, u: usize, v: usize) -> f64 {
        self.x[pair_index(self.n(), u, v)]
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("instance violates the weight assumptions:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("solution shape does not match the instance")]
    ShapeMismatch,
}

/// Build the LP for a validated instance: 3 * C(n,3) triangle rows (one per
/// choice of middle vertex per triple, kept un-deduplicated so the builder
/// stays auditable) and n size rows.
pub fn build_lp(instance: &WeightedInstance) -> Result<LpProblem, LpError> {
    let report = instance.validate_weighted();
    if !report.ok() {
        return Err(LpError::InvalidInstance(report));
    }

    let n = instance.n();
    let num_x = n * (n - 1) / 2;
    let num_y = n;

    let mut objective = Vec::with_capacity(num_x + num_y);
    let mut objective_constant = 0.0;
    for (u, v) in pairs(n) {
        let w = instance.weight(u, v);
        objective.push(w.plus - w.minus);
        objective_constant += w.minus;
    }
    objective.extend(instance.mu().iter().copied());

    let mut rows = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for (z, p, q) in [(a, b, c), (b, a, c), (c, a, b)] {
                    // x_pq <= x_pz + x_zq
                    rows.push(LpRow {
                        coeffs: vec![
                            (pair_index(n, p, q), 1.0),
                            (pair_index(n, p, z), -1.0),
                            (pair_index(n, z, q), -1.0),
                        ],
                        rel: Rel::Le,
                        rhs: 0.0,
                        kind: RowKind::Triangle { u: p, v: q, z },
                    });
                }
            }
        }
    }
    for u in 0..n {
        let mut coeffs: Vec<(usize, f64)> = (0..n)
            .filter(|&v| v != u)
            .map(|v| (pair_index(n, u, v), -1.0))
            .collect();
        coeffs.push((num_x + u, -1.0));
        rows.push(LpRow {
            coeffs,
            rel: Rel::Le,
            rhs: instance.k() as f64 - (n as f64 - 1.0),
            kind: RowKind::Size { u },
        });
    }

    let mut bounds = vec![(0.0, 1.0); num_x];
    bounds.extend(std::iter::repeat_n((0.0, f64::INFINITY), num_y));

    Ok(LpProblem {
        n,
        num_x,
        num_y,
        objective,
        objective_constant,
        rows,
        bounds,
    })
}

/// A feasibility verdict with the list of constraints that failed.
#[derive(Debug, Clone, PartialEq)]
pub struct Feasibility {
    pub ok: bool,
    pub violations: Vec<FeasViolation>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasViolation {
    ShapeMismatch,
    XBound {
        u: usize,
        v: usize,
        value: f64,
    },
    YBound {
        v: usize,
        value: f64,
    },
    Triangle {
        u: usize,
        v: usize,
        z: usize,
        excess: f64,
    },
    Size {
        u: usize,
        excess: f64,
    },
}

impl fmt::Display for FeasViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeasViolation::ShapeMismatch => write!(f, "solution shape does not match instance"),
            FeasViolation::XBound { u, v, value } => {
                write!(f, "x_{u}_{v} = {value} outside [0, 1]")
            }
            FeasViolation::YBound { v, value } => write!(f, "y_{v} = {value} < 0"),
            FeasViolation::Triangle { u, v, z, excess } => {
                write!(f, "x_{u}_{v} > x_{u}_{z} + x_{z}_{v} by {excess}")
            }
            FeasViolation::Size { u, excess } => {
                write!(f, "size row at vertex {u} violated by {excess}")
            }
        }
    }
}

/// Check bounds, all triangle rows, and all size rows within `eps`.
pub fn check_feasible(instance: &WeightedInstance, solution: &LpSolution, eps: f64) -> Feasibility {
    let n = instance.n();
    let mut violations = Vec::new();
    if solution.x.len() != n * (n - 1) / 2 || solution.y.len() != n {
        return Feasibility {
            ok: false,
            violations: vec![FeasViolation::ShapeMismatch],
        };
    }
    for (u, v) in pairs(n) {
        let x = solution.x_of(u, v);
        if !(-eps..=1.0 + eps).contains(&x) {
            violations.push(FeasViolation::XBound { u, v, value: x });
        }
    }
    for (v, &y) in solution.y.iter().enumerate() {
        if y < -eps {
            violations.push(FeasViolation::YBound { v, value: y });
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for (z, p, q) in [(a, b, c), (b, a, c), (c, a, b)] {
                    let excess = solution.x_of(p, q) - solution.x_of(p, z) - solution.x_of(z, q);
                    if excess > eps {
                        violations.push(FeasViolation::Triangle {
                            u: p,
                            v: q,
                            z,
                            excess,
                        });
                    }
                }
            }
        }
    }
    for u in 0..n {
        let sum: f64 = (0..n)
            .filter(|&v| v != u)
            .map(|v| solution.x_of(u, v))
            .sum();
        let excess = (n as f64 - 1.0 - sum) - (instance.k() as f64 + solution.y[u]);
        if excess > eps {
            violations.push(FeasViolation::Size { u, excess });
        }
    }
    Feasibility {
        ok: violations.is_empty(),
        violations,
    }
}

/// LP-cost of one edge: `w+_e x_e + w-_e (1 - x_e)`.
pub fn lp_cost_of_edge(
    instance: &WeightedInstance,
    solution: &LpSolution,
    u: usize,
    v: usize,
) -> f64 {
    let w = instance.weight(u, v);
    let x = solution.x_of(u, v);
    w.plus * x + w.minus * (1.0 - x)
}

/// Objective of a solution as written in the cost model,
/// `sum_e [w+ x + w- (1-x)] + sum_v mu_v y_v`, summed in canonical order.
pub fn objective_value(instance: &WeightedInstance, solution: &LpSolution) -> f64 {
    let edge_cost: f64 = pairs(instance.n())
        .map(|(u, v)| lp_cost_of_edge(instance, solution, u, v))
        .sum();
    let penalty: f64 = instance
        .mu()
        .iter()
        .zip(&solution.y)
        .map(|(m, y)| m * y)
        .sum();
    edge_cost + penalty
}

/// Embed a clustering as the integer feasible point `x_uv = [u, v in
/// different clusters]`, `y_u = max(0, |C(u)| - 1 - K)`.
pub fn integer_solution_from_clustering(
    instance: &WeightedInstance,
    clustering: &Clustering,
) -> Result<LpSolution, LpError> {
    let n = instance.n();
    if clustering.len() != n {
        return Err(LpError::ShapeMismatch);
    }
    let x: Vec<f64> = pairs(n)
        .map(|(u, v)| {
            if clustering.same_cluster(u, v) {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    let sizes: Vec<usize> = clustering.clusters().iter().map(|c| c.len()).collect();
    let y: Vec<f64> = (0..n)
        .map(|u| {
            let size = sizes[clustering.cluster_of(u)];
            (size as f64 - 1.0 - instance.k() as f64).max(0.0)
        })
        .collect();
    let mut solution = LpSolution {
        x,
        y,
        objective: 0.0,
    };
    solution.objective = objective_value(instance, &solution);
    Ok(solution)
}
