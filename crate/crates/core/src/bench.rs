//! Paired-seed GA versus RLGA comparison.
//!
//! Every seed is run once with each algorithm on the same evaluator. The
//! target fitness defaults to the lower median of the GA runs' final
//! fitness, and each run is scored by the first generation whose best
//! fitness reaches it.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::evaluator::FarmEvaluator;
use crate::optimizer::{generations_to_target, run_observed, Algorithm, ConvergenceRecord, RunConfig, RunResult};

/// Per-generation callback for one run of a sweep.
pub type Observer = Box<dyn FnMut(&ConvergenceRecord) -> Result<()> + Send>;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub final_fitness: f64,
    pub final_objective: f64,
    pub final_power: f64,
    pub turbines: usize,
    pub efficiency: f64,
    /// `None` when the run never reached the target.
    pub generations_to_target: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub target: f64,
    /// GA rows first, then RLGA rows, each in seed order.
    pub rows: Vec<SummaryRow>,
    pub ga: Vec<RunResult>,
    pub rlga: Vec<RunResult>,
}

impl BenchReport {
    /// Lower median of generations-to-target; runs that missed count as
    /// infinitely late, which `None` represents.
    pub fn median_generations(&self, algorithm: Algorithm) -> Option<usize> {
        let mut values: Vec<Option<usize>> =
            self.rows.iter().filter(|r| r.algorithm == algorithm).map(|r| r.generations_to_target).collect();
        values.sort_by_key(|v| v.unwrap_or(usize::MAX));
        values.get(values.len().saturating_sub(1) / 2).copied().flatten()
    }

    pub fn median_final_fitness(&self, algorithm: Algorithm) -> f64 {
        let values: Vec<f64> = self.rows.iter().filter(|r| r.algorithm == algorithm).map(|r| r.final_fitness).collect();
        lower_median(&values)
    }
}

/// Lower median: the element at index `(n-1)/2` after sorting.
pub fn lower_median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[(sorted.len() - 1) / 2]
}

/// Run both algorithms for every seed. `target` overrides the GA median.
pub fn run_bench(
    evaluator: &FarmEvaluator,
    config: &RunConfig,
    seeds: &[u64],
    target: Option<f64>,
) -> Result<BenchReport> {
    run_bench_observed(evaluator, config, seeds, target, |_, _| Ok(Box::new(|_: &ConvergenceRecord| Ok(()))))
}

/// As [`run_bench`], with `make_observer(algorithm, seed)` supplying a
/// per-generation callback for each run.
pub fn run_bench_observed<M>(
    evaluator: &FarmEvaluator,
    config: &RunConfig,
    seeds: &[u64],
    target: Option<f64>,
    make_observer: M,
) -> Result<BenchReport>
where
    M: Fn(Algorithm, u64) -> Result<Observer> + Sync,
{
    if seeds.is_empty() {
        return Err(Error::InvalidParameter("bench needs at least one seed".into()));
    }
    config.validate()?;
    let jobs: Vec<(Algorithm, u64)> =
        [Algorithm::Ga, Algorithm::Rlga].into_iter().flat_map(|a| seeds.iter().map(move |&s| (a, s))).collect();
    let results: Vec<RunResult> = jobs
        .par_iter()
        .map(|&(algorithm, seed)| {
            let observer = make_observer(algorithm, seed)?;
            run_observed(evaluator, &RunConfig { algorithm, seed, ..config.clone() }, observer)
        })
        .collect::<Result<_>>()?;
    let mut results = results.into_iter();
    let ga: Vec<RunResult> = results.by_ref().take(seeds.len()).collect();
    let rlga: Vec<RunResult> = results.collect();

    let target = target.unwrap_or_else(|| lower_median(&ga.iter().map(|r| r.best_eval.fitness).collect::<Vec<_>>()));
    let rows = jobs
        .iter()
        .zip(ga.iter().chain(&rlga))
        .map(|(&(algorithm, seed), run)| SummaryRow {
            algorithm,
            seed,
            final_fitness: run.best_eval.fitness,
            final_objective: run.best_eval.objective,
            final_power: run.best_eval.total_power,
            turbines: run.best_eval.turbine_count,
            efficiency: run.best_eval.efficiency,
            generations_to_target: generations_to_target(&run.history, target),
        })
        .collect();
    Ok(BenchReport { target, rows, ga, rlga })
}
