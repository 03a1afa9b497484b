//! Cost-per-power objective and the fitness derived from it.

use crate::error::{Error, Result};
use crate::wind::WindScenario;

/// Decay rate of the per-turbine cost discount, `exp(-0.00174 N²)`.
pub const COST_DECAY: f64 = 0.00174;

/// Floor applied to `f_obj - f_ideal` before inverting it.
pub const FITNESS_FLOOR: f64 = 1e-12;

/// Annual farm cost in single-turbine units: `N (2/3 + 1/3 exp(-0.00174 N²))`.
pub fn cost(turbines: usize) -> f64 {
    let n = turbines as f64;
    n * (2.0 / 3.0 + (1.0 / 3.0) * (-COST_DECAY * n * n).exp())
}

/// Cost per kW of expected power.
pub fn objective(total_power: f64, turbines: usize) -> Result<f64> {
    if !(total_power > 0.0) {
        return Err(Error::NoPower(total_power));
    }
    Ok(cost(turbines) / total_power)
}

/// Lower bound of the objective: an infinitely large farm of wake-free
/// turbines, where the per-turbine cost tends to 2/3.
pub fn ideal_objective(scenario: &WindScenario) -> f64 {
    (2.0 / 3.0) / scenario.free_stream_turbine_power()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fitness {
    pub value: f64,
    /// Set when `f_obj <= f_ideal` forced the denominator floor; indicates
    /// an evaluation bug rather than a good layout.
    pub clamped: bool,
}

/// `1 / (f_obj - f_ideal)`, with the denominator floored at [`FITNESS_FLOOR`].
pub fn fitness(objective: f64, ideal: f64) -> Fitness {
    let gap = objective - ideal;
    if gap > FITNESS_FLOOR {
        Fitness { value: 1.0 / gap, clamped: false }
    } else {
        Fitness { value: 1.0 / FITNESS_FLOOR, clamped: true }
    }
}

/// Actual over wake-free power for `turbines` machines under `scenario`.
pub fn efficiency(total_power: f64, turbines: usize, scenario: &WindScenario) -> Result<f64> {
    if turbines == 0 {
        return Err(Error::InvalidParameter("efficiency is undefined for an empty farm".into()));
    }
    Ok(total_power / (turbines as f64 * scenario.free_stream_turbine_power()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationResult {
    pub turbine_count: usize,
    /// Probability-weighted farm power, kW.
    pub total_power: f64,
    pub cost: f64,
    /// Cost per kW; `+inf` for an empty farm.
    pub objective: f64,
    /// Zero for an empty farm.
    pub fitness: f64,
    /// Zero for an empty farm.
    pub efficiency: f64,
    pub fitness_clamped: bool,
}

impl EvaluationResult {
    /// Assemble the objective stack from an expected power and turbine count.
    pub fn from_power(total_power: f64, turbines: usize, scenario: &WindScenario, ideal: f64) -> Self {
        if turbines == 0 || !(total_power > 0.0) {
            return EvaluationResult {
                turbine_count: turbines,
                total_power: total_power.max(0.0),
                cost: cost(turbines),
                objective: f64::INFINITY,
                fitness: 0.0,
                efficiency: 0.0,
                fitness_clamped: false,
            };
        }
        let cost = cost(turbines);
        let objective = cost / total_power;
        let fit = fitness(objective, ideal);
        EvaluationResult {
            turbine_count: turbines,
            total_power,
            cost,
            objective,
            fitness: fit.value,
            efficiency: total_power / (turbines as f64 * scenario.free_stream_turbine_power()),
            fitness_clamped: fit.clamped,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cost_values() {
        assert!((cost(30) - 22.08879).abs() < 1e-5);
        assert_eq!(cost(0), 0.0);
        assert!((cost(1) - 0.99942).abs() < 1e-5);
    }

    #[test]
    fn per_turbine_cost_decreases_towards_two_thirds() {
        let mut prev = f64::INFINITY;
        for n in 1..400 {
            let per = cost(n) / n as f64;
            assert!(per <= prev + 1e-15);
            assert!(per >= 2.0 / 3.0 - 1e-15);
            if n < 100 {
                assert!(per < prev && per > 2.0 / 3.0);
            }
            prev = per;
        }
        assert!((cost(400) / 400.0 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn objective_examples() {
        assert!((objective(14310.0, 30).unwrap() - 0.0015436).abs() < 1e-7);
        assert!((objective(19898.0, 40).unwrap() - 0.0013816).abs() < 1e-7);
        assert_eq!(objective(500.0, 0).unwrap(), 0.0);
        assert!(objective(0.0, 3).is_err());
        assert!(objective(-1.0, 3).is_err());
    }

    #[test]
    fn fitness_examples() {
        let f = fitness(0.0015436, 0.0012860);
        assert!((f.value - 3882.0).abs() < 0.5, "{}", f.value);
        assert!(!f.clamped);
        let g = fitness(0.5 + 1.0, 0.5);
        assert!((g.value - 1.0).abs() < 1e-12);
        let bad = fitness(0.001, 0.002);
        assert!(bad.clamped);
        assert_eq!(bad.value, 1e12);
    }

    #[test]
    fn fitness_is_strictly_decreasing_in_objective() {
        let ideal = 0.001286;
        let objs = [0.0013, 0.0014, 0.0015436, 0.002, 0.01];
        for w in objs.windows(2) {
            assert!(fitness(w[0], ideal).value > fitness(w[1], ideal).value);
        }
    }

    #[test]
    fn efficiency_examples() {
        let a = WindScenario::unidirectional();
        assert!((efficiency(14310.0, 30, &a).unwrap() - 0.9201).abs() < 1e-4);
        assert!((efficiency(19898.0, 40, &a).unwrap() - 0.9596).abs() < 1e-4);
        assert!((efficiency(518.4, 1, &a).unwrap() - 1.0).abs() < 1e-12);
        assert!(efficiency(100.0, 0, &a).is_err());
    }

    #[test]
    fn ideal_objectives() {
        assert!((ideal_objective(&WindScenario::unidirectional()) - 1.2860e-3).abs() < 1e-7);
        assert!((ideal_objective(&WindScenario::omnidirectional()) - 1.2860e-3).abs() < 1e-7);
    }

    #[test]
    fn empty_farm_result() {
        let a = WindScenario::unidirectional();
        let r = EvaluationResult::from_power(0.0, 0, &a, ideal_objective(&a));
        assert_eq!(r.fitness, 0.0);
        assert!(r.objective.is_infinite());
    }
}
