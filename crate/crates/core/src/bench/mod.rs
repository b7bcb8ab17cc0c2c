//! The benchmark protocol: repeated seeded runs per (algorithm, function)
//! cell, swarm-collapse stop rule, aggregation into mean/standard
//! deviation, and pairwise Welch t-tests.

pub mod report;
pub mod stats;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algorithm::{AlgorithmKind, AlgorithmRun, Overrides};
use crate::error::{Error, Result};
use crate::objectives::{Objective, ObjectiveId};
use crate::rng::{cell_seed, RngStream};
use crate::swarm::{init_swarm, stop_check};
use stats::{mean_std, welch_t_test};

/// Why a run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxIterations,
    SwarmCollapsed,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::SwarmCollapsed => "swarm_collapsed",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StopReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_iterations" => Ok(StopReason::MaxIterations),
            "swarm_collapsed" => Ok(StopReason::SwarmCollapsed),
            other => Err(Error::MalformedResults(format!("bad stop reason `{other}`"))),
        }
    }
}

/// Configuration of a single optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: AlgorithmKind,
    pub objective: ObjectiveId,
    pub dim: usize,
    pub particles: usize,
    pub max_iterations: u64,
    pub stop_threshold: f64,
    pub seed: u64,
    pub noise_sigma: f64,
    pub record_trace: bool,
    pub overrides: Overrides,
}

impl RunConfig {
    /// Benchmark-protocol defaults: dimension 10, 100 particles, 100000
    /// iteration budget, collapse threshold 0.001.
    pub fn new(algorithm: AlgorithmKind, objective: ObjectiveId, seed: u64) -> Self {
        Self {
            algorithm,
            objective,
            dim: 10,
            particles: 100,
            max_iterations: 100_000,
            stop_threshold: 0.001,
            seed,
            noise_sigma: 0.0,
            record_trace: false,
            overrides: Overrides::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.particles < 1 {
            return Err(Error::InvalidConfig("particles must be >= 1".into()));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max-iters must be >= 1".into()));
        }
        if self.dim < 1 {
            return Err(Error::InvalidConfig("dim must be >= 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a single run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub best_value: f64,
    pub best_position: Vec<f64>,
    /// Evaluation rounds used, the initialization round included.
    pub iterations_used: u64,
    pub stop_reason: StopReason,
    pub wall_time: f64,
    /// Global best value after every evaluation round, when recorded.
    pub trace: Option<Vec<f64>>,
}

/// Run one seeded optimization to collapse or budget exhaustion.
pub fn run_single(config: &RunConfig) -> Result<RunResult> {
    config.validate()?;
    let objective =
        Objective::with_dim(config.objective, config.dim).with_noise(config.noise_sigma);
    let started = Instant::now();
    let mut rng = RngStream::new(config.seed);
    let mut state = init_swarm(config.particles, &objective, &mut rng)?;
    let mut algo = AlgorithmRun::new(config.algorithm, &config.overrides, &state)?;
    let mut trace = config.record_trace.then(|| vec![state.global_best_raw]);
    let mut stop_reason = StopReason::MaxIterations;
    while state.iteration + 1 < config.max_iterations {
        if stop_check(&state, config.stop_threshold) {
            stop_reason = StopReason::SwarmCollapsed;
            break;
        }
        algo.step(&mut state, &objective, &mut rng)?;
        if let Some(t) = trace.as_mut() {
            t.push(state.global_best_raw);
        }
    }
    if config.noise_sigma == 0.0 {
        debug_assert_eq!(
            objective.eval(&state.global_best_position)?,
            state.global_best_raw,
            "cached best must match a noise-free re-evaluation"
        );
    }
    Ok(RunResult {
        best_value: state.global_best_raw,
        best_position: state.global_best_position,
        iterations_used: state.iteration + 1,
        stop_reason,
        wall_time: started.elapsed().as_secs_f64(),
        trace,
    })
}

/// Configuration of a full (algorithms x objectives x runs) suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub algorithms: Vec<AlgorithmKind>,
    pub objectives: Vec<ObjectiveId>,
    pub runs_per_cell: usize,
    pub base_seed: u64,
    pub dim: usize,
    pub particles: usize,
    pub max_iterations: u64,
    pub stop_threshold: f64,
    pub noise_sigma: f64,
    pub workers: usize,
    pub overrides: Overrides,
}

impl SuiteConfig {
    pub fn new(algorithms: Vec<AlgorithmKind>, objectives: Vec<ObjectiveId>) -> Self {
        Self {
            algorithms,
            objectives,
            runs_per_cell: 100,
            base_seed: 0,
            dim: 10,
            particles: 100,
            max_iterations: 100_000,
            stop_threshold: 0.001,
            noise_sigma: 0.0,
            workers: 1,
            overrides: Overrides::default(),
        }
    }
}

/// One line of a suite's results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: AlgorithmKind,
    pub objective: ObjectiveId,
    pub seed: u64,
    pub best_value: f64,
    pub iterations: u64,
    pub stop_reason: StopReason,
}

/// Per-cell aggregate of a suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellStats {
    pub algorithm: AlgorithmKind,
    pub objective: ObjectiveId,
    pub mean: f64,
    pub std_dev: f64,
    pub runs: usize,
}

/// One pairwise Welch comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub objective: ObjectiveId,
    pub algorithm_a: AlgorithmKind,
    pub algorithm_b: AlgorithmKind,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub degenerate: bool,
}

impl Comparison {
    pub fn significant(&self) -> bool {
        self.p < 0.05
    }
}

/// Aggregated suite statistics: one mean/sigma cell per (algorithm,
/// function) and pairwise two-tailed p-values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub cells: Vec<CellStats>,
    pub comparisons: Vec<Comparison>,
    /// Statistical test used for the comparisons.
    pub test: String,
}

/// Execute every (algorithm, objective, run) triple of the suite.
///
/// Seeds derive from the base seed, the cell labels, and the run index,
/// so cell results are independent of execution order; runs execute in
/// parallel across `workers` threads and are joined in deterministic
/// order before aggregation.
pub fn run_suite(config: &SuiteConfig) -> Result<(Vec<RunRecord>, BenchmarkReport)> {
    if config.runs_per_cell < 2 {
        return Err(Error::InvalidConfig("runs per cell must be >= 2".into()));
    }
    if config.algorithms.is_empty() || config.objectives.is_empty() {
        return Err(Error::InvalidConfig(
            "suite needs at least one algorithm and one objective".into(),
        ));
    }
    let mut run_configs = Vec::new();
    for objective in &config.objectives {
        for algorithm in &config.algorithms {
            for k in 0..config.runs_per_cell {
                let seed = cell_seed(
                    config.base_seed,
                    algorithm.id(),
                    objective.as_str(),
                    k as u64,
                );
                let mut rc = RunConfig::new(*algorithm, *objective, seed);
                rc.dim = config.dim;
                rc.particles = config.particles;
                rc.max_iterations = config.max_iterations;
                rc.stop_threshold = config.stop_threshold;
                rc.noise_sigma = config.noise_sigma;
                rc.overrides = config.overrides.clone();
                run_configs.push(rc);
            }
        }
    }

    let results: Vec<Result<RunResult>> = if config.workers > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            run_configs.par_iter().map(run_single).collect()
        })
    } else {
        run_configs.iter().map(run_single).collect()
    };

    let mut records = Vec::with_capacity(run_configs.len());
    for (rc, result) in run_configs.iter().zip(results) {
        let result = result?;
        records.push(RunRecord {
            algorithm: rc.algorithm,
            objective: rc.objective,
            seed: rc.seed,
            best_value: result.best_value,
            iterations: result.iterations_used,
            stop_reason: result.stop_reason,
        });
    }
    let report = report_from_records(&records)?;
    Ok((records, report))
}

/// Aggregate raw run records into the report: cells in first-appearance
/// order, all unordered algorithm pairs per objective.
pub fn report_from_records(records: &[RunRecord]) -> Result<BenchmarkReport> {
    if records.is_empty() {
        return Err(Error::InvalidConfig("no run records to aggregate".into()));
    }
    let mut objectives: Vec<ObjectiveId> = Vec::new();
    let mut algorithms: Vec<AlgorithmKind> = Vec::new();
    for r in records {
        if !objectives.contains(&r.objective) {
            objectives.push(r.objective);
        }
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm);
        }
    }
    let sample = |algorithm: AlgorithmKind, objective: ObjectiveId| -> Vec<f64> {
        records
            .iter()
            .filter(|r| r.algorithm == algorithm && r.objective == objective)
            .map(|r| r.best_value)
            .collect()
    };

    let mut cells = Vec::new();
    for &objective in &objectives {
        for &algorithm in &algorithms {
            let xs = sample(algorithm, objective);
            if xs.is_empty() {
                continue;
            }
            let (mean, std_dev) = mean_std(&xs);
            cells.push(CellStats {
                algorithm,
                objective,
                mean,
                std_dev,
                runs: xs.len(),
            });
        }
    }

    let mut comparisons = Vec::new();
    for &objective in &objectives {
        for (i, &a) in algorithms.iter().enumerate() {
            for &b in &algorithms[i + 1..] {
                let xa = sample(a, objective);
                let xb = sample(b, objective);
                if xa.len() < 2 || xb.len() < 2 {
                    continue;
                }
                let w = welch_t_test(&xa, &xb)?;
                comparisons.push(Comparison {
                    objective,
                    algorithm_a: a,
                    algorithm_b: b,
                    t: w.t,
                    df: w.df,
                    p: w.p,
                    degenerate: w.degenerate,
                });
            }
        }
    }

    Ok(BenchmarkReport {
        cells,
        comparisons,
        test: "welch_two_tailed".into(),
    })
}
