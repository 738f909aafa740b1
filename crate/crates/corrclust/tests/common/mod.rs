//! Shared generators for the property and acceptance suites.
#![allow(dead_code)] // each suite uses a different subset

use corrclust::instance::{Clustering, EdgeWeight, Tau, WeightedInstance};
use corrclust::lp::{integer_solution_from_clustering, objective_value, LpSolution};
use corrclust::pivot::SignedGraph;
use corrclust::rng::{self, SeededRng};

/// Random weights satisfying the validated regime: `w+ ~ U[0,1]`,
/// `w- ~ U[1 - w+, tau]` (or a bounded band above `1 - w+` when tau = INF).
pub fn random_weights(rng: &mut SeededRng, count: usize, tau: Tau) -> Vec<EdgeWeight> {
    (0..count)
        .map(|_| {
            let plus = rng::uniform_f64(rng);
            let lo = 1.0 - plus;
            let hi = match tau {
                Tau::Finite(t) => t,
                Tau::Infinite => lo + 2.0,
            };
            EdgeWeight::new(plus, rng::uniform_range(rng, lo, hi))
        })
        .collect()
}

/// An instance drawn from the acceptance distribution: `mu_v in {0, 1}`,
/// `K in {1, 2, n}`.
pub fn random_instance(rng: &mut SeededRng, n: usize, tau: Tau) -> WeightedInstance {
    let k = match rng::uniform_index(rng, 3) {
        0 => 1,
        1 => 2,
        _ => n,
    };
    let mu = (0..n).map(|_| rng::uniform_index(rng, 2) as f64).collect();
    let weights = random_weights(rng, n * (n - 1) / 2, tau);
    WeightedInstance::new(n, k, tau, mu, weights).unwrap()
}

pub fn tau_cycle(i: usize) -> Tau {
    match i % 3 {
        0 => Tau::Finite(1.0),
        1 => Tau::Finite(2.0),
        _ => Tau::Infinite,
    }
}

/// A uniformly labeled clustering with roughly `n / 2` available labels,
/// canonicalized.
pub fn random_clustering(rng: &mut SeededRng, n: usize) -> Clustering {
    let labels = 1 + rng::uniform_index(rng, n.div_ceil(2));
    Clustering::from_assignment((0..n).map(|_| rng::uniform_index(rng, labels)).collect())
}

/// A complete signed graph with each edge positive with probability 1/2.
pub fn random_signed_graph(rng: &mut SeededRng, n: usize) -> SignedGraph {
    SignedGraph::new(
        n,
        (0..n * (n - 1) / 2)
            .map(|_| rng::uniform_index(rng, 2) == 0)
            .collect(),
    )
}

/// A random convex combination of integer embeddings of `parts` random
/// clusterings: feasible by convexity.
pub fn random_feasible_point(
    rng: &mut SeededRng,
    instance: &WeightedInstance,
    parts: usize,
) -> LpSolution {
    let n = instance.n();
    let mut weights: Vec<f64> = (0..parts).map(|_| 0.05 + rng::uniform_f64(rng)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let mut x = vec![0.0; n * (n - 1) / 2];
    let mut y = vec![0.0; n];
    for &w in &weights {
        let c = random_clustering(rng, n);
        let sol = integer_solution_from_clustering(instance, &c).unwrap();
        for (acc, v) in x.iter_mut().zip(&sol.x) {
            *acc += w * v;
        }
        for (acc, v) in y.iter_mut().zip(&sol.y) {
            *acc += w * v;
        }
    }
    let mut point = LpSolution {
        x,
        y,
        objective: 0.0,
    };
    point.objective = objective_value(instance, &point);
    point
}
