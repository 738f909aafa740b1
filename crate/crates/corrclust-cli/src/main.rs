//! Command-line front end: instance I/O, LP solving, rounding, pivot runs
//! and ratio experiments, and the ratio-table printout.
//!
//! Machine-readable JSON lines go to stdout; human summaries go to stderr.
//! Exit codes: 0 ok, 2 parse/usage, 3 instance validation, 4 runtime guard.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use corrclust::format::parse_instance;
use corrclust::instance::{CostBreakdown, Tau, WeightedInstance};
use corrclust::lp::build_lp;
use corrclust::oracle::{empirical_ratio, PivotRun, DEFAULT_GUARD_N};
use corrclust::pivot::{bounded_cc_pivot, cc_pivot, Removal, SignedGraph};
use corrclust::rounding::{c_alpha, mu_star, optimal_alpha, round, table1, PivotOrder};
use corrclust::simplex::{solve_instance, SimplexConfig};

#[derive(Parser)]
#[command(
    name = "corrclust",
    version,
    about = "Weighted correlation clustering with cluster-size bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the LP relaxation and print the optimum
    SolveLp {
        /// Instance file in CORRCLUST 1 format
        instance: PathBuf,
        /// Override the solver feasibility tolerance
        #[arg(long)]
        eps: Option<f64>,
        /// Write a plain-text dump of the LP to this path
        #[arg(long, value_name = "PATH")]
        dump_lp: Option<PathBuf>,
    },
    /// Solve the LP, round it by region growing, and report the guarantee
    Round {
        instance: PathBuf,
        /// Threshold: `auto` picks the ratio-minimizing alpha for (tau, mu*)
        #[arg(long, default_value = "auto")]
        alpha: AlphaArg,
        /// Pivot order: `lowest` or `seed:N`
        #[arg(long, default_value = "lowest")]
        pivot: PivotArg,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Run cc-pivot (optionally size-bounded); with --trials, report ratio
    /// statistics against the brute-force optimum
    Pivot {
        instance: PathBuf,
        /// Bound cluster sizes by K+1 via positive-edge removal
        #[arg(long, value_name = "K")]
        bounded: Option<usize>,
        #[arg(long, value_enum, default_value_t = RemovalArg::Exact)]
        removal: RemovalArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Override the exhaustive-oracle size guard (at your own risk)
        #[arg(long, default_value_t = DEFAULT_GUARD_N)]
        guard_n: usize,
    },
    /// Print the approximation-ratio table over the special parameter values
    Table1,
}

#[derive(Clone, Copy, Debug)]
enum AlphaArg {
    Auto,
    Value(f64),
}

impl FromStr for AlphaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            Ok(AlphaArg::Auto)
        } else {
            s.parse::<f64>()
                .map(AlphaArg::Value)
                .map_err(|_| format!("expected `auto` or a number in (0, 1/2], got `{s}`"))
        }
    }
}

#[derive(Clone, Debug)]
enum PivotArg {
    Lowest,
    Seed(u64),
}

impl FromStr for PivotArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "lowest" {
            return Ok(PivotArg::Lowest);
        }
        if let Some(seed) = s.strip_prefix("seed:") {
            return seed
                .parse::<u64>()
                .map(PivotArg::Seed)
                .map_err(|_| format!("bad seed in `{s}`"));
        }
        Err(format!("expected `lowest` or `seed:N`, got `{s}`"))
    }
}

impl fmt::Display for PivotArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PivotArg::Lowest => write!(f, "lowest"),
            PivotArg::Seed(s) => write!(f, "seed:{s}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RemovalArg {
    Exact,
    Greedy,
}

enum CliError {
    /// Bad file or file contents: exit 2.
    Parse(String),
    /// The instance violates the required weight regime: exit 3.
    Validation(String),
    /// A runtime guard or parameter-domain error: exit 4.
    Guard(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Guard(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Guard(m) => m,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::SolveLp {
            instance,
            eps,
            dump_lp,
        } => cmd_solve_lp(&instance, eps, dump_lp),
        Command::Round {
            instance,
            alpha,
            pivot,
            eps,
        } => cmd_round(&instance, alpha, pivot, eps),
        Command::Pivot {
            instance,
            bounded,
            removal,
            seed,
            trials,
            guard_n,
        } => cmd_pivot(&instance, bounded, removal, seed, trials, guard_n),
        Command::Table1 => cmd_table1(),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn load_instance(path: &Path) -> Result<WeightedInstance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn require_weighted(instance: &WeightedInstance) -> Result<(), CliError> {
    let report = instance.validate_weighted();
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "instance fails the weight assumptions:\n{report}"
        )))
    }
}

fn require_unweighted(instance: &WeightedInstance) -> Result<(), CliError> {
    let report = instance.validate_unweighted();
    if report.ok() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "instance is not unweighted (+/-, mu = 1):\n{report}"
        )))
    }
}

fn tau_json(tau: Tau) -> serde_json::Value {
    match tau {
        Tau::Finite(t) => serde_json::json!(t),
        Tau::Infinite => serde_json::json!("INF"),
    }
}

#[derive(Serialize)]
struct InstanceDigest {
    n: usize,
    k: usize,
    tau: serde_json::Value,
    mu_star: f64,
}

impl InstanceDigest {
    fn of(instance: &WeightedInstance) -> Self {
        InstanceDigest {
            n: instance.n(),
            k: instance.k(),
            tau: tau_json(instance.tau()),
            mu_star: mu_star(instance).unwrap_or(0.0),
        }
    }
}

#[derive(Serialize)]
struct CostJson {
    positive: f64,
    negative: f64,
    penalty: f64,
    total: f64,
}

impl CostJson {
    fn of(cost: &CostBreakdown) -> Self {
        CostJson {
            positive: cost.positive_cost,
            negative: cost.negative_cost,
            penalty: cost.penalty_cost,
            total: cost.total,
        }
    }
}

fn emit(value: &impl Serialize) {
    println!(
        "{}",
        serde_json::to_string(value).expect("reports serialize")
    );
}

fn solver_config(eps: Option<f64>) -> SimplexConfig {
    let mut config = SimplexConfig::default();
    if let Some(eps) = eps {
        config.eps_feas = eps;
    }
    config
}

#[derive(Serialize)]
struct LpReport {
    #[serde(rename = "type")]
    kind: &'static str,
    instance: InstanceDigest,
    objective: f64,
    num_x: usize,
    num_y: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    wall_time_s: f64,
}

fn cmd_solve_lp(path: &Path, eps: Option<f64>, dump_lp: Option<PathBuf>) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    require_weighted(&instance)?;
    if let Some(dump_path) = dump_lp {
        let problem = build_lp(&instance).expect("validated instances build");
        std::fs::write(&dump_path, problem.dump())
            .map_err(|e| CliError::Parse(format!("{}: {e}", dump_path.display())))?;
        eprintln!("wrote LP dump to {}", dump_path.display());
    }
    let start = Instant::now();
    let solution = solve_instance(&instance, &solver_config(eps))
        .map_err(|e| CliError::Guard(format!("LP solve failed: {e}")))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    eprintln!(
        "LP optimum {:.9} on n = {} ({} variables) in {:.3}s",
        solution.objective,
        instance.n(),
        solution.x.len() + solution.y.len(),
        wall_time_s
    );
    emit(&LpReport {
        kind: "lp_solution",
        instance: InstanceDigest::of(&instance),
        objective: solution.objective,
        num_x: solution.x.len(),
        num_y: solution.y.len(),
        x: solution.x,
        y: solution.y,
        wall_time_s,
    });
    Ok(())
}

#[derive(Serialize)]
struct RunReport {
    #[serde(rename = "type")]
    kind: &'static str,
    instance: InstanceDigest,
    algorithm: &'static str,
    alpha: f64,
    alpha_mode: &'static str,
    pivot_rule: String,
    seed: Option<u64>,
    clusters: Vec<Vec<usize>>,
    cost: CostJson,
    lp_objective: f64,
    c_alpha: f64,
    guarantee: f64,
    wall_time_s: f64,
}

fn cmd_round(
    path: &Path,
    alpha_arg: AlphaArg,
    pivot: PivotArg,
    eps: Option<f64>,
) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    require_weighted(&instance)?;
    let mu = mu_star(&instance).map_err(|e| CliError::Guard(e.to_string()))?;

    let (alpha, ratio, alpha_mode) = match alpha_arg {
        AlphaArg::Auto => {
            let plan =
                optimal_alpha(instance.tau(), mu).map_err(|e| CliError::Guard(e.to_string()))?;
            (plan.alpha, plan.c_alpha, "auto")
        }
        AlphaArg::Value(a) => {
            let ratio =
                c_alpha(instance.tau(), mu, a).map_err(|e| CliError::Guard(e.to_string()))?;
            (a, ratio, "manual")
        }
    };
    let order = match pivot {
        PivotArg::Lowest => PivotOrder::LowestId,
        PivotArg::Seed(s) => PivotOrder::Seeded(s),
    };

    let start = Instant::now();
    let solution = solve_instance(&instance, &solver_config(eps))
        .map_err(|e| CliError::Guard(format!("LP solve failed: {e}")))?;
    let clustering =
        round(&instance, &solution, alpha, &order).map_err(|e| CliError::Guard(e.to_string()))?;
    let wall_time_s = start.elapsed().as_secs_f64();

    let cost = instance
        .clustering_cost(&clustering)
        .expect("clustering covers the instance");
    let guarantee = ratio * solution.objective;
    // The guarantee is enforced, not merely reported.
    if cost.total > guarantee + 1e-6 {
        return Err(CliError::Guard(format!(
            "internal error: rounded cost {} exceeds c_alpha * LP = {guarantee}",
            cost.total
        )));
    }

    eprintln!(
        "rounded clustering: {} clusters, cost {:.6} <= guarantee {:.6} (alpha {:.6}, c_alpha {:.4}) in {:.3}s",
        clustering.num_clusters(),
        cost.total,
        guarantee,
        alpha,
        ratio,
        wall_time_s
    );
    emit(&RunReport {
        kind: "run_report",
        instance: InstanceDigest::of(&instance),
        algorithm: "lp_round",
        alpha,
        alpha_mode,
        pivot_rule: pivot.to_string(),
        seed: match pivot {
            PivotArg::Seed(s) => Some(s),
            PivotArg::Lowest => None,
        },
        clusters: clustering.clusters(),
        cost: CostJson::of(&cost),
        lp_objective: solution.objective,
        c_alpha: ratio,
        guarantee,
        wall_time_s,
    });
    Ok(())
}

#[derive(Serialize)]
struct PivotReport {
    #[serde(rename = "type")]
    kind: &'static str,
    instance: InstanceDigest,
    algorithm: &'static str,
    removal: Option<&'static str>,
    k_bound: Option<usize>,
    seed: u64,
    clusters: Vec<Vec<usize>>,
    cost: CostJson,
    max_cluster_size: usize,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct PivotStats {
    #[serde(rename = "type")]
    kind: &'static str,
    instance: InstanceDigest,
    algorithm: &'static str,
    removal: Option<&'static str>,
    k_bound: Option<usize>,
    seed: u64,
    trials: u64,
    mean_cost: f64,
    max_cost: f64,
    opt_cost: f64,
    mean_ratio: f64,
    max_ratio: f64,
    wall_time_s: f64,
}

fn cmd_pivot(
    path: &Path,
    bounded: Option<usize>,
    removal: RemovalArg,
    seed: u64,
    trials: u64,
    guard_n: usize,
) -> Result<(), CliError> {
    let instance = load_instance(path)?;
    require_unweighted(&instance)?;
    let graph = SignedGraph::from_instance(&instance).expect("validated unweighted instance");

    let removal_lib = match removal {
        RemovalArg::Exact => Removal::Exact,
        RemovalArg::Greedy => Removal::Greedy,
    };
    let (algorithm, removal_name) = match bounded {
        Some(_) => (
            "bounded_cc_pivot",
            Some(match removal {
                RemovalArg::Exact => "exact",
                RemovalArg::Greedy => "greedy",
            }),
        ),
        None => ("cc_pivot", None),
    };
    let digest = InstanceDigest::of(&instance);

    if trials <= 1 {
        let start = Instant::now();
        let order = PivotOrder::Seeded(seed);
        let clustering = match bounded {
            Some(k) => bounded_cc_pivot(&graph, k, removal_lib, &order)
                .map_err(|e| CliError::Guard(e.to_string()))?,
            None => cc_pivot(&graph, &order).map_err(|e| CliError::Guard(e.to_string()))?,
        };
        let wall_time_s = start.elapsed().as_secs_f64();
        // Cost against the bound actually enforced by the run.
        let cost_instance = graph.to_instance(bounded.unwrap_or(graph.n()));
        let cost = cost_instance
            .clustering_cost(&clustering)
            .expect("same vertex set");
        let max_cluster_size = clustering.max_cluster_size();
        if let Some(k) = bounded {
            if max_cluster_size > k + 1 {
                return Err(CliError::Guard(format!(
                    "internal error: cluster of size {max_cluster_size} exceeds K+1 = {}",
                    k + 1
                )));
            }
        }
        eprintln!(
            "{algorithm}: {} clusters, cost {}, max cluster size {max_cluster_size} in {:.3}s",
            clustering.num_clusters(),
            cost.total,
            wall_time_s
        );
        emit(&PivotReport {
            kind: "pivot_report",
            instance: digest,
            algorithm,
            removal: removal_name,
            k_bound: bounded,
            seed,
            clusters: clustering.clusters(),
            cost: CostJson::of(&cost),
            max_cluster_size,
            wall_time_s,
        });
        return Ok(());
    }

    let run = match bounded {
        Some(k) => PivotRun::Bounded {
            k,
            removal: removal_lib,
        },
        None => PivotRun::CcPivot,
    };
    let start = Instant::now();
    let stats = empirical_ratio(&graph, run, trials, seed, guard_n)
        .map_err(|e| CliError::Guard(e.to_string()))?;
    let wall_time_s = start.elapsed().as_secs_f64();
    eprintln!(
        "{algorithm}: {trials} trials, mean cost {:.6}, opt {:.6}, mean ratio {:.4} in {:.3}s",
        stats.mean_cost, stats.opt_cost, stats.mean_ratio, wall_time_s
    );
    emit(&PivotStats {
        kind: "pivot_stats",
        instance: digest,
        algorithm,
        removal: removal_name,
        k_bound: bounded,
        seed,
        trials,
        mean_cost: stats.mean_cost,
        max_cost: stats.max_cost,
        opt_cost: stats.opt_cost,
        mean_ratio: stats.mean_ratio,
        max_ratio: stats.max_ratio,
        wall_time_s,
    });
    Ok(())
}

#[derive(Serialize)]
struct TableCellJson {
    #[serde(rename = "type")]
    kind: &'static str,
    tau: serde_json::Value,
    mu_star: f64,
    alpha: f64,
    ratio: f64,
    closed_form: bool,
}

fn cmd_table1() -> Result<(), CliError> {
    eprintln!("approximation ratios at the ratio-minimizing alpha:");
    for cell in table1() {
        eprintln!(
            "  tau = {:>4}, mu* = {:>4}: ratio {:.6} (alpha {:.6}{})",
            cell.tau.to_string(),
            cell.mu_star,
            cell.ratio,
            cell.alpha,
            if cell.closed_form {
                ", closed form"
            } else {
                ", bisection"
            }
        );
        emit(&TableCellJson {
            kind: "table1_cell",
            tau: tau_json(cell.tau),
            mu_star: cell.mu_star,
            alpha: cell.alpha,
            ratio: cell.ratio,
            closed_form: cell.closed_form,
        });
    }
    Ok(())
}
