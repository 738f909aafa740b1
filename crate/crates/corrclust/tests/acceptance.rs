//! Acceptance suite: every guarantee the artifact claims, checked end to
//! end at its stated tolerance. Each test prints one PASS/FAIL line (run
//! with `cargo test --test acceptance -- --nocapture` to see them).

mod common;

use std::time::Instant;

use corrclust::instance::{Tau, WeightedInstance};
use corrclust::lp::lp_cost_of_edge;
use corrclust::oracle::{empirical_ratio, optimal_clustering, PivotRun, DEFAULT_GUARD_N};
use corrclust::pivot::{
    bounded_cc_pivot, bounded_edge_removal_exact, bounded_edge_removal_greedy, cc_pivot, EdgeSet,
    Removal, SignedGraph,
};
use corrclust::rng;
use corrclust::rounding::{
    mu_star, optimal_alpha, rcost_lower_bound, round, table1, AlphaPlan, PivotOrder,
};
use corrclust::simplex::{solve_instance, SimplexConfig};

/// Absolute slack for the guarantee-style cost comparisons.
const COST_SLACK: f64 = 1e-6;
/// Statistical slack for the Monte-Carlo expectation bounds.
const STAT_SLACK: f64 = 1.05;

fn report(criterion: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "acceptance {criterion} failed: {detail}");
}

fn five_orders(seed: u64) -> [PivotOrder; 5] {
    [
        PivotOrder::LowestId,
        PivotOrder::Seeded(seed),
        PivotOrder::Seeded(seed.wrapping_add(1)),
        PivotOrder::Seeded(seed.wrapping_add(2)),
        PivotOrder::Seeded(seed.wrapping_add(3)),
    ]
}

#[test]
fn criterion_1_table_reproduction() {
    let start = Instant::now();
    let cells = table1();
    let cell = |tau: Tau, mu: f64| {
        cells
            .iter()
            .find(|c| c.tau == tau && c.mu_star == mu)
            .unwrap_or_else(|| panic!("missing cell ({tau:?}, {mu})"))
            .ratio
    };

    let mut failures = Vec::new();
    if cell(Tau::Finite(1.0), 0.0) != 4.0 {
        failures.push(format!(
            "(1, 0) = {}, want exactly 4",
            cell(Tau::Finite(1.0), 0.0)
        ));
    }
    if cell(Tau::Finite(2.0), 0.0) != 4.5 {
        failures.push(format!(
            "(2, 0) = {}, want exactly 4.5",
            cell(Tau::Finite(2.0), 0.0)
        ));
    }
    if cell(Tau::Infinite, 0.0) != 5.0 {
        failures.push(format!(
            "(INF, 0) = {}, want exactly 5",
            cell(Tau::Infinite, 0.0)
        ));
    }
    if (cell(Tau::Finite(1.0), 2.0) - 6.0).abs() > 1e-9 {
        failures.push(format!(
            "(1, 2) = {}, want 6 within 1e-9",
            cell(Tau::Finite(1.0), 2.0)
        ));
    }
    if (cell(Tau::Infinite, 2.0) - 6.27490).abs() > 1e-4 {
        failures.push(format!(
            "(INF, 2) = {}, want 6.27490 within 1e-4",
            cell(Tau::Infinite, 2.0)
        ));
    }
    for j in 1..=20 {
        let mu = 2.0 * j as f64 / 21.0;
        let plan = optimal_alpha(Tau::Infinite, mu).unwrap();
        let reference = 8.0 * mu / (-5.0 + (25.0 + 16.0 * mu).sqrt());
        if (plan.c_alpha - reference).abs() > 1e-9 {
            failures.push(format!("(INF, {mu}) = {}, want {reference}", plan.c_alpha));
        }
    }
    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        failures.push(format!("took {elapsed:?}, want < 1 s"));
    }
    report(
        "1 (table reproduction)",
        failures.is_empty(),
        &format!(
            "{} cells + 20 grid points in {elapsed:?}; {:?}",
            cells.len(),
            failures
        ),
    );
}

struct GuaranteeCase {
    instance: WeightedInstance,
    plan: AlphaPlan,
}

/// The shared instance stream for criteria 2 and 3: n in [3, 8], tau
/// cycling over {1, 2, INF}, mu in {0, 1}, K in {1, 2, n}.
fn guarantee_cases(count: usize) -> Vec<GuaranteeCase> {
    let mut rng = rng::seeded(0x7431);
    (0..count)
        .map(|i| {
            let n = 3 + rng::uniform_index(&mut rng, 6);
            let tau = common::tau_cycle(i);
            let instance = common::random_instance(&mut rng, n, tau);
            let plan = optimal_alpha(tau, mu_star(&instance).unwrap()).unwrap();
            GuaranteeCase { instance, plan }
        })
        .collect()
}

#[test]
fn criterion_2_rounding_guarantee_enforcement() {
    let cases = guarantee_cases(500);
    let mut rng = rng::seeded(0x7432);
    let mut checks = 0u64;
    let mut violations = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let lp = solve_instance(&case.instance, &SimplexConfig::default()).unwrap();
        let mut points = vec![lp];
        for _ in 0..10 {
            points.push(common::random_feasible_point(&mut rng, &case.instance, 3));
        }
        for (p, point) in points.iter().enumerate() {
            let bound = case.plan.c_alpha * point.objective + COST_SLACK;
            for order in five_orders((i * 31 + p) as u64) {
                let clustering = round(&case.instance, point, case.plan.alpha, &order).unwrap();
                let cost = case.instance.clustering_cost(&clustering).unwrap().total;
                checks += 1;
                if cost > bound {
                    violations.push(format!(
                        "instance {i} point {p}: cost {cost} > c_alpha * objective = {bound}"
                    ));
                }
            }
        }
    }
    report(
        "2 (rounding cost guarantee c_alpha)",
        violations.is_empty() && checks >= 500 * 11 * 5,
        &format!(
            "{} instances, {checks} rounded points, {} violations",
            cases.len(),
            violations.len()
        ),
    );
}

#[test]
fn criterion_3_relaxation_sandwich() {
    let cases = guarantee_cases(500);
    let mut checks = 0u64;
    let mut violations = Vec::new();
    for (i, case) in cases.iter().enumerate() {
        let lp = solve_instance(&case.instance, &SimplexConfig::default()).unwrap();
        let opt = optimal_clustering(&case.instance, false)
            .unwrap()
            .best_cost
            .total;
        if lp.objective > opt + 1e-7 {
            violations.push(format!("instance {i}: LP {} above OPT {opt}", lp.objective));
        }
        for order in five_orders(i as u64) {
            let clustering = round(&case.instance, &lp, case.plan.alpha, &order).unwrap();
            let rounded = case.instance.clustering_cost(&clustering).unwrap().total;
            checks += 1;
            if opt > rounded {
                violations.push(format!("instance {i}: OPT {opt} above rounded {rounded}"));
            }
            // The opt = 0 instances are excluded from the ratio; rounding is
            // still covered by the c_alpha * LP bound, which is vacuous at 0.
            if opt > 0.0 && rounded / opt > case.plan.c_alpha + COST_SLACK {
                violations.push(format!(
                    "instance {i}: ratio {} above c_alpha {}",
                    rounded / opt,
                    case.plan.c_alpha
                ));
            }
        }
    }
    report(
        "3 (relaxation sandwich)",
        violations.is_empty(),
        &format!(
            "{} instances, {checks} roundings, {} violations",
            cases.len(),
            violations.len()
        ),
    );
}

#[test]
fn criterion_4_cc_pivot_expectation() {
    let mut rng = rng::seeded(0x7434);
    let graphs = 200;
    let trials = 2000;
    let mut violations = Vec::new();
    for i in 0..graphs {
        let n = 4 + rng::uniform_index(&mut rng, 5);
        let g = common::random_signed_graph(&mut rng, n);
        let stats =
            empirical_ratio(&g, PivotRun::CcPivot, trials, 1000 + i, DEFAULT_GUARD_N).unwrap();
        if stats.opt_cost == 0.0 {
            if stats.mean_cost != 0.0 {
                violations.push(format!(
                    "graph {i}: perfect graph but mean {}",
                    stats.mean_cost
                ));
            }
        } else if stats.mean_cost > 3.0 * stats.opt_cost * STAT_SLACK {
            violations.push(format!(
                "graph {i}: mean {} above 3 * {} * {STAT_SLACK}",
                stats.mean_cost, stats.opt_cost
            ));
        }
    }

    // Deterministic case: on the two-positive/one-negative triangle every
    // pivot yields cost exactly 1.
    let tri = SignedGraph::from_positive_edges(3, &[(0, 1), (1, 2)]);
    let tri_stats = empirical_ratio(&tri, PivotRun::CcPivot, trials, 9, DEFAULT_GUARD_N).unwrap();
    if tri_stats.mean_cost != 1.0 {
        violations.push(format!("triangle mean {} != 1.0", tri_stats.mean_cost));
    }

    report(
        "4 (cc-pivot 3-approximation)",
        violations.is_empty(),
        &format!(
            "{graphs} graphs x {trials} trials + triangle, {} violations",
            violations.len()
        ),
    );
}

/// Shared stream for criteria 5 and 7: random signed graphs that fit the
/// exact-removal guard, with K alternating over {1, 2}, plus the exact set.
fn bounded_pivot_cases(count: usize) -> Vec<(SignedGraph, usize, EdgeSet)> {
    let mut rng = rng::seeded(0x7435);
    let mut cases = Vec::new();
    while cases.len() < count {
        let n = 4 + rng::uniform_index(&mut rng, 5);
        let k = 1 + cases.len() % 2;
        let g = common::random_signed_graph(&mut rng, n);
        if let Ok(x) = bounded_edge_removal_exact(&g, k) {
            cases.push((g, k, x));
        }
    }
    cases
}

#[test]
fn criterion_5_bounded_pivot_seven_approximation() {
    let cases = bounded_pivot_cases(200);
    let trials = 2000u64;
    let mut violations = Vec::new();
    let mut size_checks = 0u64;
    for (i, (g, k, x)) in cases.iter().enumerate() {
        let h = g.remove_positive(x).unwrap();
        let opt = optimal_clustering(&g.to_instance(*k), true)
            .unwrap()
            .best_cost
            .total;
        let mut sum = 0.0;
        for t in 0..trials {
            let order = PivotOrder::Seeded(rng::trial_seed(5000 + 10_000 * i as u64, t));
            let c = cc_pivot(&h, &order).unwrap();
            if t < 3 {
                // Removal is deterministic, so running on the pre-reduced
                // graph matches the full algorithm.
                let full = bounded_cc_pivot(g, *k, Removal::Exact, &order).unwrap();
                assert_eq!(full, c);
            }
            size_checks += 1;
            if c.max_cluster_size() > k + 1 {
                violations.push(format!("graph {i} trial {t}: cluster above K+1"));
            }
            sum += g.disagreements(&c) as f64;
        }
        let mean = sum / trials as f64;
        if opt == 0.0 {
            if mean != 0.0 {
                violations.push(format!(
                    "graph {i}: perfect bounded instance but mean {mean}"
                ));
            }
        } else if mean > 7.0 * opt * STAT_SLACK {
            violations.push(format!(
                "graph {i}: mean {mean} above 7 * {opt} * {STAT_SLACK}"
            ));
        }
    }
    report(
        "5 (bounded pivot: expected 7-approximation, hard size bound)",
        violations.is_empty(),
        &format!(
            "{} graphs x {trials} trials, {size_checks} size checks, {} violations",
            cases.len(),
            violations.len()
        ),
    );
}

#[test]
fn criterion_6_greedy_removal_quality() {
    let mut rng = rng::seeded(0x7436);
    let graphs = 300;
    let trials = 2000u64;
    let mut violations = Vec::new();
    let mut built = 0;
    while built < graphs {
        let n = 4 + rng::uniform_index(&mut rng, 5);
        let k = 1 + built % 2;
        let g = common::random_signed_graph(&mut rng, n);
        let Ok(exact) = bounded_edge_removal_exact(&g, k) else {
            continue;
        };
        built += 1;
        let greedy = bounded_edge_removal_greedy(&g, k);
        if greedy.len() > 2 * exact.len() {
            violations.push(format!(
                "graph {built}: |X_greedy| = {} > 2 |X_exact| = {}",
                greedy.len(),
                2 * exact.len()
            ));
        }

        let h = g.remove_positive(&greedy).unwrap();
        let opt = optimal_clustering(&g.to_instance(k), true)
            .unwrap()
            .best_cost
            .total;
        let mut sum = 0.0;
        for t in 0..trials {
            let order = PivotOrder::Seeded(rng::trial_seed(6000 + 10_000 * built as u64, t));
            let c = cc_pivot(&h, &order).unwrap();
            if c.max_cluster_size() > k + 1 {
                violations.push(format!("graph {built} trial {t}: cluster above K+1"));
            }
            sum += g.disagreements(&c) as f64;
        }
        let mean = sum / trials as f64;
        if opt == 0.0 {
            if mean != 0.0 {
                violations.push(format!("graph {built}: perfect instance but mean {mean}"));
            }
        } else if mean > 11.0 * opt * STAT_SLACK {
            violations.push(format!(
                "graph {built}: mean {mean} above 11 * {opt} * {STAT_SLACK}"
            ));
        }
    }
    report(
        "6 (greedy removal: 2-approximate X, 3r+2 = 11 pivot bound)",
        violations.is_empty(),
        &format!(
            "{graphs} graphs x {trials} trials, {} violations",
            violations.len()
        ),
    );
}

#[test]
fn criterion_7_removal_lower_bound_consistency() {
    let cases = bounded_pivot_cases(200);
    let mut violations = Vec::new();
    for (i, (g, k, x)) in cases.iter().enumerate() {
        let h = g.remove_positive(x).unwrap();
        let opt_g = optimal_clustering(&g.to_instance(*k), true)
            .unwrap()
            .best_cost
            .total;
        let opt_h = optimal_clustering(&h.to_instance(*k), true)
            .unwrap()
            .best_cost
            .total;
        let lower = (3.0 * opt_h + x.len() as f64) / 7.0;
        if opt_g < lower - 1e-9 {
            violations.push(format!(
                "graph {i}: opt_G {opt_g} below (3 opt_H + |X|)/7 = {lower}"
            ));
        }
    }
    report(
        "7 (opt_G >= (3 opt_H + |X|)/7 consistency)",
        violations.is_empty(),
        &format!(
            "{} graphs, both optima brute-forced, {} violations",
            cases.len(),
            violations.len()
        ),
    );
}

#[test]
fn criterion_8_lp_cost_bound_and_triangle_consequences() {
    let mut rng = rng::seeded(0x7438);
    let mut triangles = 0u64;
    let mut lp_bound = 0u64;
    let mut violations = Vec::new();
    let mut instances = 0usize;
    while triangles < 10_000 || lp_bound < 10_000 {
        let n = 5 + rng::uniform_index(&mut rng, 4);
        let instance = common::random_instance(&mut rng, n, common::tau_cycle(instances));
        instances += 1;
        let sol = solve_instance(&instance, &SimplexConfig::default()).unwrap();

        // Both triangle-row consequences on the solver output, for every
        // vertex u and pair {w, z}: x_wz >= x_uz - x_uw and its complement.
        for u in 0..n {
            for w in 0..n {
                for z in w + 1..n {
                    if w == u || z == u {
                        continue;
                    }
                    let (xwz, xuz, xuw) = (sol.x_of(w, z), sol.x_of(u, z), sol.x_of(u, w));
                    triangles += 1;
                    if xwz < xuz - xuw - 1e-9 {
                        violations
                            .push(format!("triangle lower: x_{w}{z} = {xwz} vs {}", xuz - xuw));
                    }
                    if 1.0 - xwz < 1.0 - xuz - xuw - 1e-9 {
                        violations.push(format!("triangle complement at ({u},{w},{z})"));
                    }
                }
            }
        }

        // The LP-cost lower bound on sampled (u, z, R, zeta, alpha)
        // satisfying its preconditions: the edges joining z and R cost at
        // least rcost_lower_bound in the LP.
        let mut sampled = 0;
        while sampled < 150 {
            let u = rng::uniform_index(&mut rng, n);
            let z = (u + 1 + rng::uniform_index(&mut rng, n - 1)) % n;
            let x_u = |v: usize| if v == u { 0.0 } else { sol.x_of(u, v) };
            let mut pool: Vec<usize> = (0..n).filter(|&v| v != z).collect();
            pool.sort_by(|&a, &b| x_u(a).total_cmp(&x_u(b)));
            let r_len = rng::uniform_index(&mut rng, pool.len() + 1);
            let r_set = &pool[..r_len];
            let mass: f64 = r_set.iter().map(|&v| x_u(v)).sum();
            let max_x = r_set.iter().map(|&v| x_u(v)).fold(0.0, f64::max);
            let alpha_min = if r_len == 0 {
                0.0
            } else {
                2.0 * mass / r_len as f64
            };
            if alpha_min > 0.5 {
                continue;
            }
            let alpha = rng::uniform_range(&mut rng, alpha_min, 0.5);
            let zeta = rng::uniform_range(&mut rng, max_x, 1.0);
            // Re-verify the preconditions at float level before calling.
            if mass > alpha * r_len as f64 / 2.0 || r_set.iter().any(|&v| x_u(v) > zeta) {
                continue;
            }
            sampled += 1;
            let bound = rcost_lower_bound(&instance, &sol, u, z, r_set, zeta, alpha).unwrap();
            let actual: f64 = r_set
                .iter()
                .map(|&v| lp_cost_of_edge(&instance, &sol, v, z))
                .sum();
            lp_bound += 1;
            if actual < bound - 1e-9 {
                violations.push(format!("LP-cost {actual} below rcost bound {bound}"));
            }
        }
    }
    report(
        "8 (LP-cost lower bound + triangle-consequence suites)",
        violations.is_empty(),
        &format!(
            "{instances} solver outputs, {triangles} triangle-consequence + {lp_bound} LP-cost-bound configurations, {} violations",
            violations.len()
        ),
    );
}

#[test]
fn criterion_9_hard_bound_splitting() {
    let mut rng = rng::seeded(0x7439);
    let pairs = 500;
    let mut violations = Vec::new();
    for i in 0..pairs {
        let n = 3 + rng::uniform_index(&mut rng, 8);
        let tau = common::tau_cycle(i);
        let k = rng::uniform_index(&mut rng, 3);
        let weights = common::random_weights(&mut rng, n * (n - 1) / 2, tau);
        let instance = WeightedInstance::new(n, k, tau, vec![1.0; n], weights).unwrap();
        assert!(instance.validate_weighted().ok());
        let clustering = common::random_clustering(&mut rng, n);
        let before = instance.clustering_cost(&clustering).unwrap().total;
        let split = instance.split_oversized(&clustering);
        let after = instance.clustering_cost(&split).unwrap().total;
        if after > before {
            violations.push(format!(
                "pair {i}: split cost {after} above original {before}"
            ));
        }
        if split.max_cluster_size() > k + 1 {
            violations.push(format!("pair {i}: split left a cluster above K+1"));
        }
    }
    report(
        "9 (hard-bound splitting never increases cost)",
        violations.is_empty(),
        &format!(
            "{pairs} instance/clustering pairs, {} violations",
            violations.len()
        ),
    );
}

/// Not a numbered criterion: double-checks that rounding the LP optimum of
/// the canonical fixtures reproduces the hand-derived values used across
/// the suite.
#[test]
fn fixture_cross_checks() {
    let triangle = WeightedInstance::from_edge_list(
        3,
        2,
        Tau::Finite(1.0),
        vec![0.0; 3],
        &[(0, 1, 1.0, 0.0), (1, 2, 1.0, 0.0), (0, 2, 0.0, 1.0)],
    )
    .unwrap();
    let lp = solve_instance(&triangle, &SimplexConfig::default()).unwrap();
    assert!((lp.objective - 1.0).abs() <= 1e-7);
    let oracle = optimal_clustering(&triangle, false).unwrap();
    assert_eq!(oracle.best_cost.total, 1.0);
    let plan = optimal_alpha(Tau::Finite(1.0), 0.0).unwrap();
    let rounded = round(&triangle, &lp, plan.alpha, &PivotOrder::LowestId).unwrap();
    let cost = triangle.clustering_cost(&rounded).unwrap().total;
    assert!(cost <= plan.c_alpha * lp.objective + COST_SLACK);
}
