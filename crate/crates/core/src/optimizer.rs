//! Full optimization runs: a fixed-operator GA, and the RLGA variant whose
//! operators are picked by a Q-learning agent at the top of each generation.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::cases::CaseId;
use crate::error::{Error, Result};
use crate::evaluation::EvaluationResult;
use crate::evaluator::FarmEvaluator;
use crate::ga::{evolve_generation, init_population, select_parents, GAParams, RngStreams};
use crate::genome::Genome;
use crate::layout::LayoutKind;
use crate::qlearn::{next_state, reward, ActionSpace, AgentState, Hyperparams, QTable};
use crate::wake::TurbineSpec;
use crate::wind::WindScenario;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Ga,
    Rlga,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Rlga => "rlga",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ga" => Ok(Algorithm::Ga),
            "rlga" => Ok(Algorithm::Rlga),
            _ => Err(Error::InvalidParameter(format!("unknown algorithm `{s}` (expected ga or rlga)"))),
        }
    }
}

/// Everything that determines a run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub case: CaseId,
    pub layout: LayoutKind,
    /// Seed of the unstructured-layout generator.
    pub layout_seed: u64,
    pub algorithm: Algorithm,
    /// Fixed operators of the GA; its population size is shared with RLGA.
    pub ga: GAParams,
    /// Operator options the RLGA agent chooses between.
    pub rl_actions: ActionSpace,
    pub hyper: Hyperparams,
    pub generations: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            case: CaseId::IA,
            layout: LayoutKind::Aligned,
            layout_seed: 1,
            algorithm: Algorithm::Rlga,
            ga: GAParams::default(),
            rl_actions: ActionSpace::rlga_default(),
            hyper: Hyperparams::default(),
            generations: 5000,
            seed: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.generations < 1 {
            return Err(Error::InvalidParameter("at least one generation is required".into()));
        }
        if self.layout == LayoutKind::Custom {
            return Err(Error::InvalidParameter("optimization needs a generated layout kind".into()));
        }
        self.ga.validate()?;
        self.rl_actions.validate(self.ga.population_size)?;
        self.hyper.validate()
    }

    /// Evaluator for the configured case and layout.
    pub fn evaluator(&self, spread_rose: Option<&WindScenario>) -> Result<FarmEvaluator> {
        let layout = self.case.layout(self.layout, self.layout_seed)?;
        Ok(FarmEvaluator::new(layout, self.case.scenario(spread_rose), TurbineSpec::default()))
    }
}

/// Best-of-population snapshot after one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRecord {
    /// 0 is the initial population.
    pub generation: usize,
    pub best_fitness: f64,
    pub best_objective: f64,
    pub best_power: f64,
    pub turbines: usize,
    /// RLGA only; absent for generation 0.
    pub action: Option<usize>,
    pub reward: Option<f64>,
    /// State reached after this generation.
    pub state: Option<AgentState>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: Genome,
    pub best_eval: EvaluationResult,
    pub history: Vec<ConvergenceRecord>,
    /// Fitness evaluations performed, initial population included.
    pub evaluations: usize,
    pub q_table: Option<QTable>,
}

impl RunResult {
    pub fn initial(&self) -> &ConvergenceRecord {
        &self.history[0]
    }
}

/// Run `config.algorithm` on `evaluator`.
pub fn run(evaluator: &FarmEvaluator, config: &RunConfig) -> Result<RunResult> {
    run_observed(evaluator, config, |_| Ok(()))
}

/// Fixed-operator GA.
pub fn run_ga(evaluator: &FarmEvaluator, config: &RunConfig) -> Result<RunResult> {
    run_observed(evaluator, &RunConfig { algorithm: Algorithm::Ga, ..config.clone() }, |_| Ok(()))
}

/// Q-learning-driven GA.
pub fn run_rlga(evaluator: &FarmEvaluator, config: &RunConfig) -> Result<RunResult> {
    run_observed(evaluator, &RunConfig { algorithm: Algorithm::Rlga, ..config.clone() }, |_| Ok(()))
}

struct Agent {
    table: QTable,
    state: AgentState,
    previous: f64,
}

/// Run and hand every generation's record to `observer` as soon as it exists.
pub fn run_observed<F>(evaluator: &FarmEvaluator, config: &RunConfig, mut observer: F) -> Result<RunResult>
where
    F: FnMut(&ConvergenceRecord) -> Result<()>,
{
    config.validate()?;
    let size = config.ga.population_size;
    let mut streams = RngStreams::from_master(config.seed);

    let mut population = init_population(evaluator.layout().len(), size, &mut streams.init);
    let mut evals = evaluate_all(evaluator, &population)?;
    let mut evaluations = population.len();

    let mut agent = match config.algorithm {
        Algorithm::Ga => None,
        Algorithm::Rlga => {
            let table = QTable::new(config.rl_actions.len(), config.hyper, &mut streams.agent)?;
            let previous = evals[best_index(&evals)].fitness;
            Some(Agent { table, state: AgentState::NoImprovement, previous })
        }
    };

    let mut history = Vec::with_capacity(config.generations + 1);
    let first = record(0, &evals[best_index(&evals)], None, None, None);
    observer(&first)?;
    history.push(first);

    for generation in 1..=config.generations {
        let (params, action) = match &agent {
            None => (config.ga, None),
            Some(a) => {
                let index = a.table.choose_action(a.state, &mut streams.agent);
                (config.rl_actions.get(index).ga_params(size), Some(index))
            }
        };

        let fitnesses: Vec<f64> = evals.iter().map(|e| e.fitness).collect();
        let next = evolve_generation(&population, &fitnesses, &params, &mut streams)?;
        let parents = select_parents(&fitnesses, params.parents_mating);
        let mut next_evals: Vec<EvaluationResult> = parents.iter().map(|&i| evals[i]).collect();
        next_evals.extend(evaluate_all(evaluator, &next[parents.len()..])?);
        evaluations += next.len() - parents.len();
        population = next;
        evals = next_evals;

        let best = evals[best_index(&evals)];
        let (step_reward, state) = match (&mut agent, action) {
            (Some(a), Some(index)) => {
                let r = reward(best.fitness, a.previous);
                let s = next_state(best.fitness, a.previous);
                a.table.update(a.state, index, r, s);
                a.state = s;
                a.previous = best.fitness;
                (Some(r), Some(s))
            }
            _ => (None, None),
        };
        let rec = record(generation, &best, action, step_reward, state);
        observer(&rec)?;
        history.push(rec);
    }

    let best_idx = best_index(&evals);
    Ok(RunResult {
        best: population[best_idx].clone(),
        best_eval: evals[best_idx],
        history,
        evaluations,
        q_table: agent.map(|a| a.table),
    })
}

fn evaluate_all(evaluator: &FarmEvaluator, genomes: &[Genome]) -> Result<Vec<EvaluationResult>> {
    genomes.par_iter().map(|g| evaluator.evaluate(g)).collect()
}

fn best_index(evals: &[EvaluationResult]) -> usize {
    let fitnesses: Vec<f64> = evals.iter().map(|e| e.fitness).collect();
    select_parents(&fitnesses, 1)[0]
}

fn record(
    generation: usize,
    best: &EvaluationResult,
    action: Option<usize>,
    reward: Option<f64>,
    state: Option<AgentState>,
) -> ConvergenceRecord {
    ConvergenceRecord {
        generation,
        best_fitness: best.fitness,
        best_objective: best.objective,
        best_power: best.total_power,
        turbines: best.turbine_count,
        action,
        reward,
        state,
    }
}

/// First generation whose best fitness reaches `target`.
pub fn generations_to_target(history: &[ConvergenceRecord], target: f64) -> Option<usize> {
    history.iter().find(|r| r.best_fitness >= target).map(|r| r.generation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::CrossoverKind;

    fn history(values: &[f64]) -> Vec<ConvergenceRecord> {
        values
            .iter()
            .enumerate()
            .map(|(generation, &best_fitness)| ConvergenceRecord {
                generation,
                best_fitness,
                best_objective: 0.0,
                best_power: 0.0,
                turbines: 0,
                action: None,
                reward: None,
                state: None,
            })
            .collect()
    }

    #[test]
    fn target_lookup() {
        let h = history(&[1.0, 2.0, 3.0]);
        assert_eq!(generations_to_target(&h, 2.0), Some(1));
        assert_eq!(generations_to_target(&h, 3.5), None);
        assert_eq!(generations_to_target(&h, 0.0), Some(0));
    }

    #[test]
    fn config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        assert!(RunConfig { generations: 0, ..Default::default() }.validate().is_err());
        let tiny = RunConfig { ga: GAParams { population_size: 2, ..GAParams::default() }, ..Default::default() };
        // RLGA options include three parents, which a population of two cannot supply
        assert!(tiny.validate().is_err());
    }

    #[test]
    fn short_runs_are_deterministic_and_monotone() {
        let config = RunConfig { generations: 200, seed: 3, ..Default::default() };
        let evaluator = config.evaluator(None).unwrap();
        for algorithm in [Algorithm::Ga, Algorithm::Rlga] {
            let c = RunConfig { algorithm, ..config.clone() };
            let a = run(&evaluator, &c).unwrap();
            let b = run(&evaluator, &c).unwrap();
            assert_eq!(a.history, b.history);
            assert_eq!(a.history.len(), 201);
            assert!(a.history.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
            assert_eq!(a.best_eval.fitness, a.history.last().unwrap().best_fitness);
        }
    }

    #[test]
    fn ga_budget_accounting() {
        let config = RunConfig { generations: 50, algorithm: Algorithm::Ga, ..Default::default() };
        let evaluator = config.evaluator(None).unwrap();
        let result = run(&evaluator, &config).unwrap();
        assert_eq!(result.evaluations, 5 + 50 * 3);
        assert!(result.q_table.is_none());
    }

    #[test]
    fn rlga_records_actions_in_space() {
        let config = RunConfig { generations: 100, seed: 8, ..Default::default() };
        let evaluator = config.evaluator(None).unwrap();
        let result = run_rlga(&evaluator, &config).unwrap();
        assert!(result.history[0].action.is_none());
        assert!(result.history[1..].iter().all(|r| r.action.is_some_and(|a| a < 32)));
        assert!(result.history[1..].iter().all(|r| r.reward.is_some_and(|x| x >= 0.0)));
    }

    #[test]
    fn single_action_rlga_matches_ga() {
        let config = RunConfig {
            generations: 300,
            seed: 21,
            hyper: Hyperparams { epsilon: 0.0, ..Default::default() },
            rl_actions: ActionSpace::single(crate::qlearn::Action {
                parents_mating: 2,
                crossover: CrossoverKind::SinglePoint,
                mutation_percent: 4.0,
            }),
            ..Default::default()
        };
        let evaluator = config.evaluator(None).unwrap();
        let ga = run_ga(&evaluator, &config).unwrap();
        let rl = run_rlga(&evaluator, &config).unwrap();
        for (g, r) in ga.history.iter().zip(&rl.history) {
            assert_eq!(g.best_fitness.to_bits(), r.best_fitness.to_bits());
            assert_eq!(g.turbines, r.turbines);
        }
        assert_eq!(ga.best, rl.best);
    }
}
