//! Two-phase primal simplex on a dense tableau. The entering column follows
//! Bland's lowest-index rule; the leaving row uses the lexicographic ratio
//! test, which is what keeps the iteration from cycling on this LP's
//! heavily degenerate vertices.
//!
//! Sized for the clustering LP at desk scale (n <= 20, a few hundred rows);
//! no factorization, no sparsity. Upper bounds on the x variables are
//! materialized as explicit rows, so phase 1 is only needed when some size
//! row has a negative right-hand side (K < n - 1).

use thiserror::Error;

use crate::instance::WeightedInstance;
use crate::lp::{build_lp, objective_value, LpError, LpProblem, LpSolution, Rel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexConfig {
    pub max_iterations: usize,
    /// Zero threshold for pivot elements and reduced costs.
    pub eps_pivot: f64,
    /// Feasibility tolerance (phase-1 residual, output checks).
    pub eps_feas: f64,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        SimplexConfig {
            max_iterations: 200_000,
            eps_pivot: 1e-9,
            eps_feas: 1e-7,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplexError {
    #[error("simplex exceeded {0} iterations")]
    IterationLimit(usize),
    #[error("phase 1 ended with infeasibility {0}; the clustering LP is always feasible, so this is an internal error")]
    Infeasible(f64),
    #[error(
        "unbounded in column {0}; the clustering LP is bounded below, so this is an internal error"
    )]
    Unbounded(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
}

/// Right-hand sides within this of zero are snapped to exact zero after
/// every pivot. Degenerate basics then stay exactly degenerate, so the
/// ratio test ties exactly and the lexicographic tie-break can resolve
/// them as in the exact-arithmetic argument; without the snap, noise of
/// order 1e-12 masquerades as blocking rows and the iteration stalls.
const B_SNAP: f64 = 1e-11;

struct Tableau {
    m: usize,
    ncols: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    basis: Vec<usize>,
    obj: Vec<f64>,
    obj_val: f64,
    banned: Vec<bool>,
    scratch: Vec<f64>,
    iterations: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let nc = self.ncols;
        let p = self.a[r * nc + c];
        for j in 0..nc {
            self.a[r * nc + j] /= p;
        }
        self.a[r * nc + c] = 1.0;
        self.b[r] /= p;
        if self.b[r].abs() <= B_SNAP {
            self.b[r] = 0.0;
        }
        self.scratch.copy_from_slice(&self.a[r * nc..(r + 1) * nc]);
        let br = self.b[r];
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * nc + c];
            if f != 0.0 {
                let row = &mut self.a[i * nc..(i + 1) * nc];
                for (x, s) in row.iter_mut().zip(&self.scratch) {
                    *x -= f * s;
                }
                row[c] = 0.0;
                self.b[i] -= f * br;
                if self.b[i].abs() <= B_SNAP {
                    self.b[i] = 0.0;
                }
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for (x, s) in self.obj.iter_mut().zip(&self.scratch) {
                *x -= f * s;
            }
            self.obj[c] = 0.0;
            self.obj_val += f * br;
        }
        self.basis[r] = c;
    }

    /// True iff row `i` normalized by its pivot-column entry is
    /// lexicographically smaller than row `best` normalized likewise,
    /// starting the comparison at the ratio itself.
    fn lex_less(&self, i: usize, best: usize, c: usize) -> bool {
        let nc = self.ncols;
        let ai = self.a[i * nc + c];
        let ab = self.a[best * nc + c];
        let ri = self.b[i].max(0.0) / ai;
        let rb = self.b[best].max(0.0) / ab;
        if ri != rb {
            return ri < rb;
        }
        for j in 0..nc {
            let vi = self.a[i * nc + j] / ai;
            let vb = self.a[best * nc + j] / ab;
            if vi != vb {
                return vi < vb;
            }
        }
        false
    }

    /// Entering column by Bland's lowest-index rule; leaving row by the
    /// minimum ratio with lexicographic tie-breaking (Dantzig-Orden-Wolfe),
    /// which is what actually prevents cycling on this LP's heavily
    /// degenerate vertices.
    fn run(&mut self, config: &SimplexConfig, art_start: usize) -> Result<(), SimplexError> {
        loop {
            let mut enter = None;
            for j in 0..self.ncols {
                if !self.banned[j] && self.obj[j] < -config.eps_pivot {
                    enter = Some(j);
                    break;
                }
            }
            let Some(c) = enter else { return Ok(()) };

            let mut leave: Option<usize> = None;
            for i in 0..self.m {
                if self.a[i * self.ncols + c] > config.eps_pivot {
                    let better = match leave {
                        None => true,
                        Some(best) => self.lex_less(i, best, c),
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else {
                return Err(SimplexError::Unbounded(c));
            };

            let leaving_var = self.basis[r];
            self.pivot(r, c);
            if leaving_var >= art_start {
                self.banned[leaving_var] = true;
            }

            self.iterations += 1;
            if self.iterations > config.max_iterations {
                return Err(SimplexError::IterationLimit(config.max_iterations));
            }
        }
    }

    fn drop_row(&mut self, r: usize) {
        let nc = self.ncols;
        let last = self.m - 1;
        if r != last {
            let (head, tail) = self.a.split_at_mut(last * nc);
            head[r * nc..(r + 1) * nc].copy_from_slice(&tail[..nc]);
            self.b[r] = self.b[last];
            self.basis[r] = self.basis[last];
        }
        self.a.truncate(last * nc);
        self.b.truncate(last);
        self.basis.truncate(last);
        self.m = last;
    }
}

/// Solve to optimality. Deterministic: identical inputs produce bit-identical
/// solutions.
pub fn solve(problem: &LpProblem, config: &SimplexConfig) -> Result<LpSolution, SimplexError> {
    let nv = problem.num_vars();

    // Assemble rows: the problem's rows plus one explicit row per finite
    // upper bound, all normalized to nonnegative right-hand sides.
    type NormRow = (Vec<(usize, f64)>, Rel, f64);
    let mut rows: Vec<NormRow> = problem
        .rows
        .iter()
        .map(|r| (r.coeffs.clone(), r.rel, r.rhs))
        .collect();
    for (i, &(lo, hi)) in problem.bounds.iter().enumerate() {
        debug_assert_eq!(lo, 0.0);
        if hi.is_finite() {
            rows.push((vec![(i, 1.0)], Rel::Le, hi));
        }
    }
    for (coeffs, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            for (_, c) in coeffs.iter_mut() {
                *c = -*c;
            }
            *rhs = -*rhs;
            *rel = match *rel {
                Rel::Le => Rel::Ge,
                Rel::Ge => Rel::Le,
            };
        }
    }

    let m = rows.len();
    let num_art = rows.iter().filter(|(_, rel, _)| *rel == Rel::Ge).count();
    let art_start = nv + m;
    let ncols = nv + m + num_art;

    let mut t = Tableau {
        m,
        ncols,
        a: vec![0.0; m * ncols],
        b: vec![0.0; m],
        basis: vec![0; m],
        obj: vec![0.0; ncols],
        obj_val: 0.0,
        banned: vec![false; ncols],
        scratch: vec![0.0; ncols],
        iterations: 0,
    };

    let mut next_art = art_start;
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        for &(j, c) in coeffs {
            t.a[i * ncols + j] += c;
        }
        t.b[i] = *rhs;
        match rel {
            Rel::Le => {
                t.a[i * ncols + nv + i] = 1.0;
                t.basis[i] = nv + i;
            }
            Rel::Ge => {
                t.a[i * ncols + nv + i] = -1.0;
                t.a[i * ncols + next_art] = 1.0;
                t.basis[i] = next_art;
                next_art += 1;
            }
        }
    }

    if num_art > 0 {
        // Phase 1: minimize the sum of artificials.
        for j in art_start..ncols {
            t.obj[j] = 1.0;
        }
        for i in 0..m {
            if t.basis[i] >= art_start {
                for j in 0..ncols {
                    t.obj[j] -= t.a[i * ncols + j];
                }
                t.obj_val += t.b[i];
            }
        }
        t.run(config, art_start)?;
        if t.obj_val > config.eps_feas {
            return Err(SimplexError::Infeasible(t.obj_val));
        }
        // Pivot leftover artificials out of the basis; a row where that is
        // impossible is redundant and gets dropped.
        let mut i = 0;
        while i < t.m {
            if t.basis[i] >= art_start {
                let col = (0..art_start)
                    .find(|&j| !t.banned[j] && t.a[i * t.ncols + j].abs() > config.eps_pivot);
                match col {
                    Some(j) => {
                        let leaving = t.basis[i];
                        t.pivot(i, j);
                        t.banned[leaving] = true;
                        i += 1;
                    }
                    None => t.drop_row(i),
                }
            } else {
                i += 1;
            }
        }
        for j in art_start..ncols {
            t.banned[j] = true;
        }
    }

    // Phase 2: the real objective, expressed over the current basis.
    t.obj.iter_mut().for_each(|c| *c = 0.0);
    t.obj[..nv].copy_from_slice(&problem.objective);
    t.obj_val = 0.0;
    for i in 0..t.m {
        let bi = t.basis[i];
        let cb = if bi < nv { problem.objective[bi] } else { 0.0 };
        if cb != 0.0 {
            for j in 0..ncols {
                t.obj[j] -= cb * t.a[i * ncols + j];
            }
            t.obj_val += cb * t.b[i];
        }
    }
    for i in 0..t.m {
        t.obj[t.basis[i]] = 0.0;
    }
    t.run(config, art_start)?;

    let mut values = vec![0.0; nv];
    for i in 0..t.m {
        if t.basis[i] < nv {
            values[t.basis[i]] = t.b[i];
        }
    }
    for (v, &(lo, hi)) in values.iter_mut().zip(&problem.bounds) {
        *v = v.clamp(lo, hi);
    }

    let objective = values
        .iter()
        .zip(&problem.objective)
        .map(|(v, c)| v * c)
        .sum::<f64>()
        + problem.objective_constant;
    let (x, y) = values.split_at(problem.num_x());
    Ok(LpSolution {
        x: x.to_vec(),
        y: y.to_vec(),
        objective,
    })
}

/// Build the LP for an instance and solve it. The reported objective is
/// re-evaluated through [`objective_value`] so that it matches the
/// clustering cost expression term for term.
pub fn solve_instance(
    instance: &WeightedInstance,
    config: &SimplexConfig,
) -> Result<LpSolution, SolveError> {
    let problem = build_lp(instance)?;
    let mut solution = solve(&problem, config)?;
    solution.objective = objective_value(instance, &solution);
    Ok(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Clustering, EdgeWeight, Tau};
    use crate::lp::{check_feasible, integer_solution_from_clustering};

    fn pm_triangle() -> WeightedInstance {
        WeightedInstance::from_edge_list(
            3,
            2,
            Tau::Finite(1.0),
            vec![0.0; 3],
            &[(0, 1, 1.0, 0.0), (1, 2, 1.0, 0.0), (0, 2, 0.0, 1.0)],
        )
        .unwrap()
    }

    fn perfect_two_cliques() -> WeightedInstance {
        WeightedInstance::from_edge_list(
            4,
            4,
            Tau::Finite(1.0),
            vec![0.0; 4],
            &[
                (0, 1, 1.0, 0.0),
                (2, 3, 1.0, 0.0),
                (0, 2, 0.0, 1.0),
                (0, 3, 0.0, 1.0),
                (1, 2, 0.0, 1.0),
                (1, 3, 0.0, 1.0),
            ],
        )
        .unwrap()
    }

    /// Minimum objective over every integer point (all set partitions,
    /// enumerated by assignment vectors). Independent of the simplex path.
    fn integer_minimum(instance: &WeightedInstance) -> f64 {
        let n = instance.n();
        let mut best = f64::INFINITY;
        let mut assignment = vec![0usize; n];
        loop {
            let clustering = Clustering::from_assignment(assignment.clone());
            let sol = integer_solution_from_clustering(instance, &clustering).unwrap();
            best = best.min(sol.objective);
            // Odometer over {0..n-1}^n; canonicalization dedups labelings.
            let mut i = 0;
            loop {
                if i == n {
                    return best;
                }
                assignment[i] += 1;
                if assignment[i] < n {
                    break;
                }
                assignment[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn perfect_instance_solves_to_zero() {
        let inst = perfect_two_cliques();
        let sol = solve_instance(&inst, &SimplexConfig::default()).unwrap();
        assert!(sol.objective.abs() <= 1e-7, "objective {}", sol.objective);
        assert!(check_feasible(&inst, &sol, 1e-7).ok);
    }

    #[test]
    fn pm_triangle_optimum_is_one() {
        let inst = pm_triangle();
        let sol = solve_instance(&inst, &SimplexConfig::default()).unwrap();
        // The triangle row x_02 <= x_01 + x_12 forces objective >= 1, and
        // x = 0 attains it; the integer brute force agrees.
        assert_eq!(integer_minimum(&inst), 1.0);
        assert!(
            (sol.objective - 1.0).abs() <= 1e-7,
            "objective {}",
            sol.objective
        );
        assert!(check_feasible(&inst, &sol, 1e-7).ok);
    }

    #[test]
    fn relaxation_never_exceeds_integer_minimum() {
        let mut rng = crate::rng::seeded(11);
        for _ in 0..20 {
            let n = 3 + crate::rng::uniform_index(&mut rng, 4); // 3..=6
            let inst = random_instance(&mut rng, n, Tau::Finite(2.0));
            let sol = solve_instance(&inst, &SimplexConfig::default()).unwrap();
            assert!(check_feasible(&inst, &sol, 1e-7).ok);
            let best = integer_minimum(&inst);
            assert!(
                sol.objective <= best + 1e-7,
                "lp {} above integer minimum {}",
                sol.objective,
                best
            );
        }
    }

    #[test]
    fn perfect_instances_solve_to_zero() {
        // Planted ground truth: positive (1, 0) inside blocks, negative
        // (0, w-) across, cluster sizes within K + 1.
        let mut rng = crate::rng::seeded(83);
        for trial in 0..10 {
            let n = 4 + crate::rng::uniform_index(&mut rng, 4);
            let k = 1 + crate::rng::uniform_index(&mut rng, 2);
            let truth = Clustering::from_assignment((0..n).map(|v| v / (k + 1)).collect());
            let weights = crate::instance::pairs(n)
                .map(|(u, v)| {
                    if truth.same_cluster(u, v) {
                        EdgeWeight::positive()
                    } else {
                        EdgeWeight::new(0.0, 1.0 + crate::rng::uniform_f64(&mut rng))
                    }
                })
                .collect();
            let inst =
                WeightedInstance::new(n, k, Tau::Finite(2.0), vec![1.0; n], weights).unwrap();
            assert_eq!(inst.clustering_cost(&truth).unwrap().total, 0.0);
            let sol = solve_instance(&inst, &SimplexConfig::default()).unwrap();
            assert!(
                sol.objective.abs() <= 1e-7,
                "trial {trial}: objective {}",
                sol.objective
            );
        }
    }

    #[test]
    fn outputs_are_feasible_up_to_desk_scale() {
        let mut rng = crate::rng::seeded(71);
        for n in [9, 10, 11, 12] {
            let tau = if n % 2 == 0 {
                Tau::Finite(2.0)
            } else {
                Tau::Infinite
            };
            let inst = random_instance_with_mu(&mut rng, n, tau, 1.0, 2);
            let sol = solve_instance(&inst, &SimplexConfig::default()).unwrap();
            let feas = check_feasible(&inst, &sol, 1e-7);
            assert!(feas.ok, "n = {n}: {:?}", feas.violations.first());
        }
    }

    #[test]
    fn resolving_is_bit_identical() {
        let mut rng = crate::rng::seeded(5);
        let inst = random_instance(&mut rng, 6, Tau::Finite(1.0));
        let a = solve_instance(&inst, &SimplexConfig::default()).unwrap();
        let b = solve_instance(&inst, &SimplexConfig::default()).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.x), bits(&b.x));
        assert_eq!(bits(&a.y), bits(&b.y));
        assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    }

    #[test]
    fn size_penalties_never_lower_the_optimum() {
        let mut rng = crate::rng::seeded(23);
        for _ in 0..10 {
            let n = 4 + crate::rng::uniform_index(&mut rng, 3);
            let free = random_instance_with_mu(&mut rng, n, Tau::Finite(2.0), 0.0, 1);
            let penalized = free.clone_with_mu(1.0);
            let a = solve_instance(&free, &SimplexConfig::default()).unwrap();
            let b = solve_instance(&penalized, &SimplexConfig::default()).unwrap();
            assert!(
                b.objective >= a.objective - 1e-7,
                "{} < {}",
                b.objective,
                a.objective
            );
        }
    }

    trait CloneWithMu {
        fn clone_with_mu(&self, mu: f64) -> WeightedInstance;
    }

    impl CloneWithMu for WeightedInstance {
        fn clone_with_mu(&self, mu: f64) -> WeightedInstance {
            let weights: Vec<EdgeWeight> = crate::instance::pairs(self.n())
                .map(|(u, v)| self.weight(u, v))
                .collect();
            WeightedInstance::new(self.n(), self.k(), self.tau(), vec![mu; self.n()], weights)
                .unwrap()
        }
    }

    fn random_instance_with_mu(
        rng: &mut crate::rng::SeededRng,
        n: usize,
        tau: Tau,
        mu: f64,
        k: usize,
    ) -> WeightedInstance {
        let weights: Vec<EdgeWeight> = (0..n * (n - 1) / 2)
            .map(|_| {
                let plus = crate::rng::uniform_f64(rng);
                let lo = 1.0 - plus;
                let hi = match tau {
                    Tau::Finite(t) => t,
                    Tau::Infinite => lo + 2.0,
                };
                EdgeWeight::new(plus, crate::rng::uniform_range(rng, lo, hi))
            })
            .collect();
        WeightedInstance::new(n, k, tau, vec![mu; n], weights).unwrap()
    }

    fn random_instance(rng: &mut crate::rng::SeededRng, n: usize, tau: Tau) -> WeightedInstance {
        let k = 1 + crate::rng::uniform_index(rng, n);
        let mu = if crate::rng::uniform_f64(rng) < 0.5 {
            0.0
        } else {
            1.0
        };
        random_instance_with_mu(rng, n, tau, mu, k)
    }
}
