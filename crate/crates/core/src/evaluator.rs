//! Cached evaluation of genomes over a fixed layout and wind climate.
//!
//! For a fixed candidate set the scaled deficit `(A_w/πr²)·ΔU/U` between
//! two positions depends only on the wind direction, not on which other
//! turbines are present or on the wind speed. [`FarmEvaluator`] tabulates
//! the squared terms once per direction; evaluating a genome then reduces to
//! summing table entries over its active turbines.

use rayon::prelude::*;

use crate::error::Result;
use crate::evaluation::{ideal_objective, EvaluationResult};
use crate::genome::Genome;
use crate::layout::CandidateLayout;
use crate::wake::{relative_in_wind_frame, wake_fraction, TurbineSpec, POWER_COEFF};
use crate::wind::WindScenario;

/// Wake interactions for one wind direction.
#[derive(Debug, Clone)]
struct DirectionTable {
    /// `Σ p u³` over the bins sharing this direction.
    weighted_cube: f64,
    /// For each downstream position, `(upwind position, squared scaled deficit)`.
    upwind: Vec<Vec<(u32, f64)>>,
}

#[derive(Debug, Clone)]
pub struct FarmEvaluator {
    layout: CandidateLayout,
    scenario: WindScenario,
    spec: TurbineSpec,
    ideal: f64,
    tables: Vec<DirectionTable>,
}

impl FarmEvaluator {
    pub fn new(layout: CandidateLayout, scenario: WindScenario, spec: TurbineSpec) -> Self {
        // group bins by direction, keeping first-appearance order
        let mut groups: Vec<(f64, f64)> = Vec::new();
        for bin in scenario.bins() {
            let weight = bin.probability * bin.speed.powi(3);
            match groups.iter_mut().find(|(d, _)| *d == bin.direction) {
                Some(group) => group.1 += weight,
                None => groups.push((bin.direction, weight)),
            }
        }
        let positions = &layout.positions;
        let tables = groups
            .par_iter()
            .map(|&(direction, weighted_cube)| {
                let upwind = positions
                    .iter()
                    .map(|&target| {
                        positions
                            .iter()
                            .enumerate()
                            .filter_map(|(j, &source)| {
                                let frac = wake_fraction(relative_in_wind_frame(target, source, direction), &spec);
                                (frac > 0.0).then_some((j as u32, frac * frac))
                            })
                            .collect()
                    })
                    .collect();
                DirectionTable { weighted_cube, upwind }
            })
            .collect();
        let ideal = ideal_objective(&scenario);
        FarmEvaluator { layout, scenario, spec, ideal, tables }
    }

    pub fn layout(&self) -> &CandidateLayout {
        &self.layout
    }

    pub fn scenario(&self) -> &WindScenario {
        &self.scenario
    }

    pub fn spec(&self) -> &TurbineSpec {
        &self.spec
    }

    pub fn ideal_objective(&self) -> f64 {
        self.ideal
    }

    /// Probability-weighted farm power in kW.
    pub fn expected_power(&self, genome: &Genome) -> Result<f64> {
        self.layout.check_genome(genome)?;
        Ok(self.power_unchecked(genome))
    }

    fn power_unchecked(&self, genome: &Genome) -> f64 {
        let bits = genome.bits();
        let mut power = 0.0;
        for table in &self.tables {
            let mut cube_sum = 0.0;
            for (i, upwind) in table.upwind.iter().enumerate() {
                if !bits[i] {
                    continue;
                }
                let sum_sq: f64 = upwind.iter().filter(|(j, _)| bits[*j as usize]).map(|(_, sq)| sq).sum();
                let ratio = if sum_sq == 0.0 { 1.0 } else { (1.0 - sum_sq.sqrt()).max(0.0) };
                cube_sum += ratio * ratio * ratio;
            }
            power += POWER_COEFF * table.weighted_cube * cube_sum;
        }
        power
    }

    /// Full objective stack for one genome.
    pub fn evaluate(&self, genome: &Genome) -> Result<EvaluationResult> {
        self.layout.check_genome(genome)?;
        let power = self.power_unchecked(genome);
        Ok(EvaluationResult::from_power(power, genome.count_ones(), &self.scenario, self.ideal))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::{aligned_grid, sunflower_layout, Extent};
    use crate::wind::expected_power;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_genome(len: usize, density: f64, rng: &mut ChaCha8Rng) -> Genome {
        Genome::new((0..len).map(|_| rng.gen::<f64>() < density).collect())
    }

    #[test]
    fn matches_direct_evaluation() {
        let spec = TurbineSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cases = [
            (aligned_grid(Extent::square(2000.0), 200.0).unwrap(), WindScenario::unidirectional()),
            (aligned_grid(Extent::square(2000.0), 200.0).unwrap(), WindScenario::spread_default()),
            (sunflower_layout(Extent::square(2000.0), 100).unwrap(), WindScenario::omnidirectional()),
        ];
        for (layout, scenario) in cases {
            let eval = FarmEvaluator::new(layout.clone(), scenario.clone(), spec);
            for density in [0.1, 0.3, 0.6] {
                let g = random_genome(layout.len(), density, &mut rng);
                let cached = eval.expected_power(&g).unwrap();
                let direct = expected_power(&g, &layout, &scenario, &spec).unwrap();
                assert!((cached - direct).abs() <= 1e-9 * direct, "{cached} vs {direct}");
            }
        }
    }

    #[test]
    fn single_turbine_and_empty_genome() {
        let layout = aligned_grid(Extent::square(2000.0), 200.0).unwrap();
        let eval = FarmEvaluator::new(layout, WindScenario::unidirectional(), TurbineSpec::default());
        let one = eval.evaluate(&Genome::from_indices(100, &[55])).unwrap();
        assert!((one.total_power - 518.4).abs() < 1e-9);
        assert!((one.efficiency - 1.0).abs() < 1e-12);
        let none = eval.evaluate(&Genome::zeros(100)).unwrap();
        assert_eq!(none.fitness, 0.0);
        assert!(eval.evaluate(&Genome::zeros(99)).is_err());
    }
}
