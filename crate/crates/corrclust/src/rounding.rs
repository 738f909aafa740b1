//! Alpha-threshold region growing on a feasible LP point, the guarantee
//! constant `c_alpha`, and the optimizer for `alpha`.
//!
//! Region growing repeatedly picks a pivot `u`, gathers the ball
//! `T = { w : x_uw <= alpha }`, and emits either `{u}` (when the ball is
//! LP-expensive) or `{u} union T`. For any feasible point the produced
//! clustering costs at most `c_alpha` times the point's objective.

use thiserror::Error;

use crate::instance::{Clustering, Tau, WeightedInstance};
use crate::lp::{check_feasible, LpSolution, DEFAULT_FEAS_EPS};
use crate::rng;

/// How the pivot vertex is chosen among the remaining vertices. The cost
/// guarantee holds for every choice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PivotOrder {
    /// Smallest remaining id. The deterministic default.
    LowestId,
    /// A fixed permutation of `0..n`; at each step the earliest remaining
    /// entry is the pivot.
    Explicit(Vec<usize>),
    /// Uniform over the remaining vertices, from a ChaCha8 stream with this
    /// seed.
    Seeded(u64),
}

/// A rounding threshold together with its guaranteed approximation ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaPlan {
    pub tau: Tau,
    pub mu_star: f64,
    pub alpha: f64,
    pub c_alpha: f64,
    /// `gamma = alpha - alpha / (4 tau)` (`alpha` itself when tau = INF);
    /// always within `[3 alpha / 4, alpha]`.
    pub gamma: f64,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoundingError {
    #[error("alpha = {0} outside (0, 1/2]")]
    AlphaOutOfRange(f64),
    #[error("alpha = 1/2 requires mu* = 0, got mu* = {0}")]
    AlphaHalfNeedsZeroMuStar(f64),
    #[error("mu* = {0} outside [0, 4]: the optimal-alpha analysis assumes mu* <= 4; pick alpha manually and use c_alpha directly")]
    MuStarOutOfRange(f64),
    #[error("mu* needs at least two vertices, instance has {0}")]
    InstanceTooSmall(usize),
    #[error("explicit pivot order is not a permutation of the vertices")]
    NotAPermutation,
    #[error("solution shape does not match the instance")]
    ShapeMismatch,
    #[error("input point is not feasible: {0}")]
    InfeasibleInput(String),
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}

/// `mu* = max over distinct pairs of (mu_u + mu_v)`, i.e. the sum of the
/// two largest penalties.
pub fn mu_star(instance: &WeightedInstance) -> Result<f64, RoundingError> {
    if instance.n() < 2 {
        return Err(RoundingError::InstanceTooSmall(instance.n()));
    }
    let (mut hi, mut second) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &m in instance.mu() {
        if m > hi {
            second = hi;
            hi = m;
        } else if m > second {
            second = m;
        }
    }
    Ok(hi + second)
}

fn middle_term(tau: Tau, alpha: f64) -> f64 {
    // 1 / (1 - 2 alpha + alpha / (2 tau)); the tau term vanishes at INF.
    let denom = match tau {
        Tau::Finite(t) => 1.0 - 2.0 * alpha + alpha / (2.0 * t),
        Tau::Infinite => 1.0 - 2.0 * alpha,
    };
    1.0 / denom
}

/// The guarantee constant
/// `c_alpha = max { mu*, 2 alpha mu* / (1 - 2 alpha) + 1 / (1 - 2 alpha + alpha / (2 tau)), 2 / alpha }`,
/// reducing to `max { 1 / (1 - 2 alpha + alpha / (2 tau)), 2 / alpha }`
/// when `mu* = 0` (the only case in which `alpha = 1/2` is admissible).
pub fn c_alpha(tau: Tau, mu_star: f64, alpha: f64) -> Result<f64, RoundingError> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(RoundingError::AlphaOutOfRange(alpha));
    }
    if !(0.0..=f64::INFINITY).contains(&mu_star) {
        return Err(RoundingError::MuStarOutOfRange(mu_star));
    }
    if mu_star == 0.0 {
        return Ok(middle_term(tau, alpha).max(2.0 / alpha));
    }
    if alpha >= 0.5 {
        return Err(RoundingError::AlphaHalfNeedsZeroMuStar(mu_star));
    }
    let penalty_term = 2.0 * alpha * mu_star / (1.0 - 2.0 * alpha) + middle_term(tau, alpha);
    Ok(mu_star.max(penalty_term).max(2.0 / alpha))
}

/// Residual whose unique root in (0, 1/2) balances the middle term of
/// `c_alpha` against `2 / alpha`.
fn alpha_residual(tau: Tau, mu_star: f64, alpha: f64) -> f64 {
    2.0 * alpha * mu_star / (1.0 - 2.0 * alpha) + middle_term(tau, alpha) - 2.0 / alpha
}

/// The ratio-minimizing threshold for `mu* in [0, 4]`:
///
/// * `mu* = 0`: `alpha = 2 tau / (5 tau - 1)`, ratio `5 - 1/tau`
///   (`alpha = 2/5`, ratio 5 at tau = INF);
/// * `tau = INF, mu* > 0`: `alpha = (-5 + sqrt(25 + 16 mu*)) / (4 mu*)`;
/// * otherwise: bisection on (0, 1/2) to absolute tolerance 1e-12.
pub fn optimal_alpha(tau: Tau, mu_star: f64) -> Result<AlphaPlan, RoundingError> {
    if !(0.0..=4.0).contains(&mu_star) {
        return Err(RoundingError::MuStarOutOfRange(mu_star));
    }
    // For the closed-form cases the ratio is taken from its closed form as
    // well, so exact values like 4, 4.5 and 5 survive floating point.
    let (alpha, ratio) = if mu_star == 0.0 {
        match tau {
            Tau::Finite(t) => (2.0 * t / (5.0 * t - 1.0), 5.0 - 1.0 / t),
            Tau::Infinite => (0.4, 5.0),
        }
    } else if tau == Tau::Infinite {
        let root = -5.0 + (25.0 + 16.0 * mu_star).sqrt();
        (root / (4.0 * mu_star), 8.0 * mu_star / root)
    } else {
        // The residual runs from -inf at 0+ to +inf at 1/2-, crossing once.
        let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if alpha_residual(tau, mu_star, mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let alpha = 0.5 * (lo + hi);
        (alpha, c_alpha(tau, mu_star, alpha)?)
    };
    let gamma = match tau {
        Tau::Finite(t) => alpha - alpha / (4.0 * t),
        Tau::Infinite => alpha,
    };
    Ok(AlphaPlan {
        tau,
        mu_star,
        alpha,
        c_alpha: ratio,
        gamma,
    })
}

/// One cell of the ratio table: the guaranteed approximation ratio at a
/// `(tau, mu*)` pair, with the threshold that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Table1Cell {
    pub tau: Tau,
    pub mu_star: f64,
    pub alpha: f64,
    pub ratio: f64,
    /// Whether the cell comes from a closed form (`mu* = 0` or `tau = INF`)
    /// rather than bisection.
    pub closed_form: bool,
}

/// The ratio table over the special parameter values: the `mu* = 0` row at
/// `tau in {1, 2, 4, INF}`, the soft-bound row at `mu* = 1` plus a `mu*`
/// grid at `tau = INF`, and the hard-bound row `mu* = 2`.
pub fn table1() -> Vec<Table1Cell> {
    let mut cells = Vec::new();
    let mut push = |tau: Tau, mu: f64| {
        let plan = optimal_alpha(tau, mu).expect("table parameters are in range");
        let closed_form = mu == 0.0 || tau == Tau::Infinite;
        cells.push(Table1Cell {
            tau,
            mu_star: mu,
            alpha: plan.alpha,
            ratio: plan.c_alpha,
            closed_form,
        });
    };
    for t in [1.0, 2.0, 4.0] {
        push(Tau::Finite(t), 0.0);
    }
    push(Tau::Infinite, 0.0);
    push(Tau::Finite(1.0), 1.0);
    push(Tau::Finite(2.0), 1.0);
    for i in 1..20 {
        push(Tau::Infinite, i as f64 / 10.0);
    }
    push(Tau::Finite(1.0), 2.0);
    push(Tau::Finite(2.0), 2.0);
    push(Tau::Infinite, 2.0);
    cells
}

/// Round a feasible point into a clustering with threshold `alpha in
/// (0, 1/2]`. Comparisons are inclusive exactly as in the procedure's
/// definition: `T` collects `x_uw <= alpha`, and the singleton branch fires
/// when `sum_{w in T} x_uw >= alpha |T| / 2`.
///
/// In debug builds the input point is checked for feasibility first.
pub fn round(
    instance: &WeightedInstance,
    solution: &LpSolution,
    alpha: f64,
    order: &PivotOrder,
) -> Result<Clustering, RoundingError> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(RoundingError::AlphaOutOfRange(alpha));
    }
    let n = instance.n();
    if solution.x.len() != n * (n - 1) / 2 || solution.y.len() != n {
        return Err(RoundingError::ShapeMismatch);
    }
    if cfg!(debug_assertions) {
        let feas = check_feasible(instance, solution, DEFAULT_FEAS_EPS);
        if !feas.ok {
            return Err(RoundingError::InfeasibleInput(format!(
                "{}",
                feas.violations[0]
            )));
        }
    }

    let mut picker = Picker::new(order, n)?;
    let mut alive = vec![true; n];
    let mut remaining = n;
    let mut assignment = vec![0usize; n];
    let mut next_cluster = 0;

    while remaining > 0 {
        let u = picker.next(&alive);
        let ball: Vec<usize> = (0..n)
            .filter(|&w| w != u && alive[w] && solution.x_of(u, w) <= alpha)
            .collect();
        let ball_mass: f64 = ball.iter().map(|&w| solution.x_of(u, w)).sum();

        let members: &[usize] = if ball_mass >= alpha * ball.len() as f64 / 2.0 {
            &[]
        } else {
            &ball
        };
        assignment[u] = next_cluster;
        alive[u] = false;
        remaining -= 1;
        for &w in members {
            assignment[w] = next_cluster;
            alive[w] = false;
            remaining -= 1;
        }
        next_cluster += 1;
    }
    Ok(Clustering::from_assignment(assignment))
}

/// Pivot selection shared by region growing and `cc_pivot`.
pub(crate) struct Picker {
    mode: PickerMode,
}

enum PickerMode {
    Lowest,
    Explicit { seq: Vec<usize>, pos: usize },
    Seeded(rng::SeededRng),
}

impl Picker {
    pub(crate) fn new(order: &PivotOrder, n: usize) -> Result<Self, RoundingError> {
        let mode = match order {
            PivotOrder::LowestId => PickerMode::Lowest,
            PivotOrder::Explicit(seq) => {
                let mut seen = vec![false; n];
                if seq.len() != n {
                    return Err(RoundingError::NotAPermutation);
                }
                for &v in seq {
                    if v >= n || seen[v] {
                        return Err(RoundingError::NotAPermutation);
                    }
                    seen[v] = true;
                }
                PickerMode::Explicit {
                    seq: seq.clone(),
                    pos: 0,
                }
            }
            PivotOrder::Seeded(seed) => PickerMode::Seeded(rng::seeded(*seed)),
        };
        Ok(Picker { mode })
    }

    /// Next pivot among the still-alive vertices (at least one must remain).
    pub(crate) fn next(&mut self, alive: &[bool]) -> usize {
        match &mut self.mode {
            PickerMode::Lowest => alive.iter().position(|&a| a).expect("no vertices remain"),
            PickerMode::Explicit { seq, pos } => {
                while !alive[seq[*pos]] {
                    *pos += 1;
                }
                let v = seq[*pos];
                *pos += 1;
                v
            }
            PickerMode::Seeded(rng) => {
                let live: Vec<usize> = alive
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a)
                    .map(|(v, _)| v)
                    .collect();
                live[rng::uniform_index(rng, live.len())]
            }
        }
    }
}

/// Lower bound on the total LP-cost of the edges joining `z` to the set `R`,
/// given `sum_{v in R} x_uv <= alpha |R| / 2` and `x_uv <= zeta` on `R`:
///
/// `sum_{v in R} [ w+_vz x_uz + w-_vz (1 - x_uz) - zeta (w+_vz + w-_vz) + (zeta - alpha/2) ]`
///
/// Test support for the region-growing analysis; not used by `round`.
pub fn rcost_lower_bound(
    instance: &WeightedInstance,
    solution: &LpSolution,
    u: usize,
    z: usize,
    r_set: &[usize],
    zeta: f64,
    alpha: f64,
) -> Result<f64, RoundingError> {
    let n = instance.n();
    if u >= n || z >= n || r_set.iter().any(|&v| v >= n) {
        return Err(RoundingError::Precondition("vertex out of range"));
    }
    if u == z || r_set.contains(&z) {
        return Err(RoundingError::Precondition(
            "z must lie outside R and differ from u",
        ));
    }
    if !(0.0..=1.0).contains(&zeta) {
        return Err(RoundingError::Precondition("zeta outside [0, 1]"));
    }
    let x_u = |v: usize| if v == u { 0.0 } else { solution.x_of(u, v) };
    if r_set.iter().any(|&v| x_u(v) > zeta) {
        return Err(RoundingError::Precondition("some x_uv exceeds zeta"));
    }
    let mass: f64 = r_set.iter().map(|&v| x_u(v)).sum();
    if mass > alpha * r_set.len() as f64 / 2.0 {
        return Err(RoundingError::Precondition(
            "sum of x_uv exceeds alpha |R| / 2",
        ));
    }
    let x_uz = x_u(z);
    Ok(r_set
        .iter()
        .map(|&v| {
            let w = instance.weight(v, z);
            w.plus * x_uz + w.minus * (1.0 - x_uz) - zeta * (w.plus + w.minus)
                + (zeta - alpha / 2.0)
        })
        .sum())
}
