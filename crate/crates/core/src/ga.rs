//! Binary-genome genetic algorithm operators.
//!
//! One generation keeps the `parents_mating` fittest individuals verbatim
//! and refills the population with mutated crossover offspring of random
//! parent pairs (steady-state, elitist).

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;

/// Seeded, reproducible random stream.
pub type RngStream = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrossoverKind {
    SinglePoint,
    Uniform,
    TwoPoints,
    Scattered,
}

impl CrossoverKind {
    pub const ALL: [CrossoverKind; 4] =
        [CrossoverKind::SinglePoint, CrossoverKind::Uniform, CrossoverKind::TwoPoints, CrossoverKind::Scattered];

    pub fn as_str(&self) -> &'static str {
        match self {
            CrossoverKind::SinglePoint => "single_point",
            CrossoverKind::Uniform => "uniform",
            CrossoverKind::TwoPoints => "two_points",
            CrossoverKind::Scattered => "scattered",
        }
    }
}

impl fmt::Display for CrossoverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CrossoverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace(['-', ' '], "_").as_str() {
            "single_point" => Ok(CrossoverKind::SinglePoint),
            "uniform" => Ok(CrossoverKind::Uniform),
            "two_points" => Ok(CrossoverKind::TwoPoints),
            "scattered" => Ok(CrossoverKind::Scattered),
            _ => Err(Error::InvalidParameter(format!(
                "unknown crossover kind `{s}` (expected single_point, uniform, two_points or scattered)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GAParams {
    pub population_size: usize,
    pub parents_mating: usize,
    pub crossover: CrossoverKind,
    /// Percent of genes flipped per offspring.
    pub mutation_percent: f64,
}

impl Default for GAParams {
    fn default() -> Self {
        GAParams { population_size: 5, parents_mating: 2, crossover: CrossoverKind::SinglePoint, mutation_percent: 4.0 }
    }
}

impl GAParams {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::InvalidParameter(format!(
                "population size must be at least 2, got {}",
                self.population_size
            )));
        }
        if self.parents_mating < 2 || self.parents_mating > self.population_size {
            return Err(Error::InvalidParameter(format!(
                "parents mating must lie in [2, {}], got {}",
                self.population_size, self.parents_mating
            )));
        }
        if !(self.mutation_percent >= 0.0) || !self.mutation_percent.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mutation percent must be a nonnegative number, got {}",
                self.mutation_percent
            )));
        }
        Ok(())
    }

    pub fn offspring_per_generation(&self) -> usize {
        self.population_size - self.parents_mating
    }
}

/// Independent streams for every random decision of a run, all derived
/// from one master seed so that consumers never perturb each other.
#[derive(Debug, Clone)]
pub struct RngStreams {
    pub init: RngStream,
    pub selection: RngStream,
    pub crossover: RngStream,
    pub mutation: RngStream,
    pub agent: RngStream,
}

impl RngStreams {
    pub fn from_master(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        RngStreams {
            init: stream(1),
            selection: stream(2),
            crossover: stream(3),
            mutation: stream(4),
            agent: stream(5),
        }
    }
}

/// `size` random genomes of length `len`, each gene set with probability 0.5.
pub fn init_population(len: usize, size: usize, rng: &mut RngStream) -> Vec<Genome> {
    (0..size).map(|_| Genome::new((0..len).map(|_| rng.gen_bool(0.5)).collect())).collect()
}

/// Indices of the `count` fittest individuals, best first; ties go to the
/// lower index.
pub fn select_parents(fitnesses: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitnesses.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].total_cmp(&fitnesses[a]).then(a.cmp(&b)));
    order.truncate(count);
    order
}

/// Recombine two parents into two children. Every child gene is copied from
/// the same position of one parent.
pub fn crossover(a: &Genome, b: &Genome, kind: CrossoverKind, rng: &mut RngStream) -> Result<(Genome, Genome)> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { genome: b.len(), layout: a.len() });
    }
    let len = a.len();
    Ok(match kind {
        CrossoverKind::SinglePoint => {
            if len < 2 {
                return Ok((a.clone(), b.clone()));
            }
            single_point_at(a, b, rng.gen_range(1..len))
        }
        CrossoverKind::TwoPoints => {
            if len < 3 {
                return crossover(a, b, CrossoverKind::SinglePoint, rng);
            }
            let cuts = index::sample(rng, len - 1, 2);
            let (lo, hi) = (cuts.index(0).min(cuts.index(1)) + 1, cuts.index(0).max(cuts.index(1)) + 1);
            two_points_at(a, b, lo, hi)
        }
        CrossoverKind::Uniform => {
            let mask: Vec<bool> = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            masked(a, b, &mask)
        }
        CrossoverKind::Scattered => {
            let mut mask = Vec::with_capacity(len);
            while mask.len() < len {
                let word = rng.next_u64();
                mask.extend((0..64).map(|bit| word >> bit & 1 == 1).take(len - mask.len()));
            }
            masked(a, b, &mask)
        }
    })
}

/// Swap the suffixes starting at `cut`.
pub fn single_point_at(a: &Genome, b: &Genome, cut: usize) -> (Genome, Genome) {
    let mut c1 = a.bits()[..cut].to_vec();
    c1.extend_from_slice(&b.bits()[cut..]);
    let mut c2 = b.bits()[..cut].to_vec();
    c2.extend_from_slice(&a.bits()[cut..]);
    (Genome::new(c1), Genome::new(c2))
}

/// Swap the segment `[lo, hi)`.
pub fn two_points_at(a: &Genome, b: &Genome, lo: usize, hi: usize) -> (Genome, Genome) {
    let mut c1 = a.clone();
    let mut c2 = b.clone();
    c1.bits_mut()[lo..hi].copy_from_slice(&b.bits()[lo..hi]);
    c2.bits_mut()[lo..hi].copy_from_slice(&a.bits()[lo..hi]);
    (c1, c2)
}

fn masked(a: &Genome, b: &Genome, mask: &[bool]) -> (Genome, Genome) {
    let pick = |first: &Genome, second: &Genome| {
        Genome::new(mask.iter().enumerate().map(|(i, &m)| if m { first.get(i) } else { second.get(i) }).collect())
    };
    (pick(a, b), pick(b, a))
}

/// Number of genes [`mutate`] flips: zero when mutation is off, otherwise
/// `max(1, round(percent/100 · len))`, capped at `len`.
pub fn mutation_flips(len: usize, percent: f64) -> usize {
    if percent == 0.0 || len == 0 {
        return 0;
    }
    ((percent / 100.0 * len as f64).round() as usize).max(1).min(len)
}

/// Flip [`mutation_flips`] distinct, uniformly chosen genes.
pub fn mutate(mut genome: Genome, percent: f64, rng: &mut RngStream) -> Genome {
    let flips = mutation_flips(genome.len(), percent);
    if flips > 0 {
        for i in index::sample(rng, genome.len(), flips) {
            genome.flip(i);
        }
    }
    genome
}

/// Next population: the selected parents (best first, unmodified) followed by
/// `population_size - parents_mating` mutated offspring.
pub fn evolve_generation(
    population: &[Genome],
    fitnesses: &[f64],
    params: &GAParams,
    streams: &mut RngStreams,
) -> Result<Vec<Genome>> {
    params.validate()?;
    if population.len() != params.population_size || fitnesses.len() != population.len() {
        return Err(Error::InvalidParameter(format!(
            "population of {} with {} fitnesses does not match population size {}",
            population.len(),
            fitnesses.len(),
            params.population_size
        )));
    }
    let parents = select_parents(fitnesses, params.parents_mating);
    let mut next: Vec<Genome> = parents.iter().map(|&i| population[i].clone()).collect();
    while next.len() < params.population_size {
        let first = streams.selection.gen_range(0..parents.len());
        let mut second = streams.selection.gen_range(0..parents.len() - 1);
        if second >= first {
            second += 1;
        }
        let (c1, c2) = crossover(
            &population[parents[first]],
            &population[parents[second]],
            params.crossover,
            &mut streams.crossover,
        )?;
        for child in [c1, c2] {
            if next.len() < params.population_size {
                next.push(mutate(child, params.mutation_percent, &mut streams.mutation));
            }
        }
    }
    Ok(next)
}
