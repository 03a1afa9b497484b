//! Tabular Q-learning over GA operator configurations.
//!
//! The agent has two states (did the best fitness improve last generation or
//! not) and one action per combination of parents-mating count, crossover
//! kind and mutation percent.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ga::{CrossoverKind, GAParams, RngStream};

/// Upper bound of the uniform initial Q-values.
pub const INITIAL_Q_MAX: f64 = 1e-2;

/// One GA operator configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Action {
    pub parents_mating: usize,
    pub crossover: CrossoverKind,
    pub mutation_percent: f64,
}

impl Action {
    pub fn ga_params(&self, population_size: usize) -> GAParams {
        GAParams {
            population_size,
            parents_mating: self.parents_mating,
            crossover: self.crossover,
            mutation_percent: self.mutation_percent,
        }
    }
}

/// Cartesian product of the option sets, indexed lexicographically in the
/// order (parents mating, crossover kind, mutation percent).
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpace {
    parents_mating: Vec<usize>,
    crossovers: Vec<CrossoverKind>,
    mutation_percents: Vec<f64>,
    actions: Vec<Action>,
}

impl ActionSpace {
    pub fn new(
        parents_mating: Vec<usize>,
        crossovers: Vec<CrossoverKind>,
        mutation_percents: Vec<f64>,
    ) -> Result<Self> {
        if parents_mating.is_empty() || crossovers.is_empty() || mutation_percents.is_empty() {
            return Err(Error::InvalidParameter("every action option set needs at least one entry".into()));
        }
        let mut actions = Vec::with_capacity(parents_mating.len() * crossovers.len() * mutation_percents.len());
        for &p in &parents_mating {
            for &c in &crossovers {
                for &m in &mutation_percents {
                    actions.push(Action { parents_mating: p, crossover: c, mutation_percent: m });
                }
            }
        }
        Ok(ActionSpace { parents_mating, crossovers, mutation_percents, actions })
    }

    /// Two parent counts × four crossover kinds × four mutation rates.
    pub fn rlga_default() -> Self {
        ActionSpace::new(vec![2, 3], CrossoverKind::ALL.to_vec(), vec![1.0, 2.0, 3.0, 4.0])
            .expect("default option sets are nonempty")
    }

    /// Space holding exactly one action.
    pub fn single(action: Action) -> Self {
        ActionSpace::new(vec![action.parents_mating], vec![action.crossover], vec![action.mutation_percent])
            .expect("singleton option sets are nonempty")
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn get(&self, index: usize) -> Action {
        self.actions[index]
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn parents_mating(&self) -> &[usize] {
        &self.parents_mating
    }

    pub fn crossovers(&self) -> &[CrossoverKind] {
        &self.crossovers
    }

    pub fn mutation_percents(&self) -> &[f64] {
        &self.mutation_percents
    }

    /// Check every action yields valid GA parameters for `population_size`.
    pub fn validate(&self, population_size: usize) -> Result<()> {
        self.actions.iter().try_for_each(|a| a.ga_params(population_size).validate())
    }
}

/// Whether the best fitness improved in the last generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AgentState {
    #[default]
    NoImprovement,
    Improved,
}

impl AgentState {
    pub fn index(self) -> usize {
        match self {
            AgentState::NoImprovement => 0,
            AgentState::Improved => 1,
        }
    }
}

/// Learning rate, discount factor and exploration rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams { alpha: 0.1, gamma: 0.9, epsilon: 0.1 }
    }
}

impl Hyperparams {
    /// `alpha ∈ [0, 1]` (zero freezes the table), `gamma ∈ [0, 1)`, `epsilon ∈ [0, 1]`.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("learning rate must lie in [0, 1], got {}", self.alpha)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!("discount factor must lie in [0, 1), got {}", self.gamma)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidParameter(format!("exploration rate must lie in [0, 1], got {}", self.epsilon)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    values: Vec<f64>,
    actions: usize,
    hyper: Hyperparams,
}

impl QTable {
    /// Two-state table over `actions` actions, initialized uniformly in
    /// `[0, 0.01]` from `rng`.
    pub fn new(actions: usize, hyper: Hyperparams, rng: &mut RngStream) -> Result<Self> {
        hyper.validate()?;
        if actions == 0 {
            return Err(Error::InvalidParameter("Q-table needs at least one action".into()));
        }
        let values = (0..2 * actions).map(|_| rng.gen_range(0.0..=INITIAL_Q_MAX)).collect();
        Ok(QTable { values, actions, hyper })
    }

    /// 2 × 32 table seeded directly.
    pub fn seeded(seed: u64, hyper: Hyperparams) -> Result<Self> {
        QTable::new(ActionSpace::rlga_default().len(), hyper, &mut ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn shape(&self) -> (usize, usize) {
        (2, self.actions)
    }

    pub fn hyperparams(&self) -> Hyperparams {
        self.hyper
    }

    pub fn get(&self, state: AgentState, action: usize) -> f64 {
        self.values[state.index() * self.actions + action]
    }

    pub fn set(&mut self, state: AgentState, action: usize, value: f64) {
        self.values[state.index() * self.actions + action] = value;
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn row(&self, state: AgentState) -> &[f64] {
        &self.values[state.index() * self.actions..(state.index() + 1) * self.actions]
    }

    /// Highest-valued action in `state`; ties go to the lowest index.
    pub fn greedy(&self, state: AgentState) -> usize {
        let row = self.row(state);
        let mut best = 0;
        for (i, &v) in row.iter().enumerate().skip(1) {
            if v > row[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_value(&self, state: AgentState) -> f64 {
        self.row(state).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// ε-greedy choice. Always consumes exactly one uniform draw, plus one
    /// more when exploring.
    pub fn choose_action(&self, state: AgentState, rng: &mut RngStream) -> usize {
        if rng.gen::<f64>() < self.hyper.epsilon {
            rng.gen_range(0..self.actions)
        } else {
            self.greedy(state)
        }
    }

    /// One-step Bellman update of the `(state, action)` cell.
    pub fn update(&mut self, state: AgentState, action: usize, reward: f64, next: AgentState) {
        let current = self.get(state, action);
        let target = reward + self.hyper.gamma * self.max_value(next);
        self.set(state, action, current + self.hyper.alpha * (target - current));
    }

    /// CSV dump: `state,action_index,parents_mating,crossover,mutation_percent,value`.
    pub fn to_csv(&self, space: &ActionSpace) -> String {
        let mut out = String::from("state,action_index,parents_mating,crossover,mutation_percent,value\n");
        for state in [AgentState::NoImprovement, AgentState::Improved] {
            for (i, a) in space.actions().iter().enumerate().take(self.actions) {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    state.index(),
                    i,
                    a.parents_mating,
                    a.crossover,
                    a.mutation_percent,
                    self.get(state, i)
                );
            }
        }
        out
    }
}

/// Fitness change between consecutive generations.
pub fn reward(current: f64, previous: f64) -> f64 {
    current - previous
}

/// Improved iff `current > previous` strictly.
pub fn next_state(current: f64, previous: f64) -> AgentState {
    if current > previous {
        AgentState::Improved
    } else {
        AgentState::NoImprovement
    }
}
