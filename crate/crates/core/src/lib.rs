//! Wind farm layout optimization on a discrete candidate grid.
//!
//! Turbine interactions follow the Jensen top-hat wake with quadratic
//! superposition. A binary genome switches candidate positions on and off,
//! and a steady-state genetic algorithm maximizes `1/(f_obj - f_ideal)`,
//! where `f_obj` is cost per kW. The RLGA variant lets a tabular Q-learning
//! agent choose the crossover, mutation rate and parent count of every
//! generation.

// `!(x > 0.0)` guards reject NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod cases;
pub mod error;
pub mod evaluation;
pub mod evaluator;
pub mod ga;
pub mod genome;
pub mod io;
pub mod layout;
pub mod optimizer;
pub mod qlearn;
pub mod wake;
pub mod wind;

pub use cases::CaseId;
pub use error::{Error, Result};
pub use evaluation::EvaluationResult;
pub use evaluator::FarmEvaluator;
pub use ga::{CrossoverKind, GAParams};
pub use genome::Genome;
pub use layout::{CandidateLayout, Extent, LayoutKind};
pub use optimizer::{Algorithm, RunConfig, RunResult};
pub use qlearn::{ActionSpace, Hyperparams, QTable};
pub use wake::{Point, TurbineSpec};
pub use wind::WindScenario;
