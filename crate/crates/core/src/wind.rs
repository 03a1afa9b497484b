//! Wind climates and probability-weighted farm power.

use std::path::Path;

use crate::error::{Error, Result};
use crate::evaluation::ideal_objective;
use crate::genome::Genome;
use crate::layout::CandidateLayout;
use crate::wake::{effective_speeds, total_power, TurbineSpec, POWER_COEFF};

/// Ideal objective the spread rose must reproduce, per kW.
pub const SPREAD_IDEAL_OBJECTIVE: f64 = 6.785e-4;

/// Relative tolerance of the spread-rose transcription gate.
pub const SPREAD_GATE_TOL: f64 = 0.005;

/// Speeds admitted in a spread rose, m/s.
pub const SPREAD_SPEEDS: [f64; 3] = [8.0, 12.0, 17.0];

const PROBABILITY_TOL: f64 = 1e-9;

/// Bundled spread rose, `direction_deg,speed_ms,probability`.
pub const DEFAULT_SPREAD_ROSE: &str = include_str!("../data/spread_rose.csv");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindBin {
    /// Bearing the wind blows from, degrees clockwise from north.
    pub direction: f64,
    pub speed: f64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WindScenario {
    bins: Vec<WindBin>,
}

impl WindScenario {
    /// Validate bins: probabilities nonnegative summing to one, speeds
    /// positive, directions in `[0, 360)`.
    pub fn new(bins: Vec<WindBin>) -> Result<Self> {
        if bins.is_empty() {
            return Err(Error::Scenario("no wind bins".into()));
        }
        for b in &bins {
            if !(b.probability >= 0.0) {
                return Err(Error::Scenario(format!("negative probability {} at {}°", b.probability, b.direction)));
            }
            if !(b.speed > 0.0) || !b.speed.is_finite() {
                return Err(Error::Scenario(format!("nonpositive speed {} at {}°", b.speed, b.direction)));
            }
            if !(0.0..360.0).contains(&b.direction) {
                return Err(Error::Scenario(format!("direction {} outside [0, 360)", b.direction)));
            }
        }
        let total: f64 = bins.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > PROBABILITY_TOL {
            return Err(Error::Scenario(format!("probabilities sum to {total}, not 1")));
        }
        Ok(WindScenario { bins })
    }

    /// 12 m/s from the north, all the time.
    pub fn unidirectional() -> Self {
        WindScenario { bins: vec![WindBin { direction: 0.0, speed: 12.0, probability: 1.0 }] }
    }

    /// 12 m/s from 36 equally likely directions, 10° apart.
    pub fn omnidirectional() -> Self {
        let bins =
            (0..36).map(|k| WindBin { direction: 10.0 * k as f64, speed: 12.0, probability: 1.0 / 36.0 }).collect();
        WindScenario { bins }
    }

    /// Non-uniform rose over 8, 12 and 17 m/s.
    ///
    /// Rows must sum to one within `1e-6` (they are then renormalized) and
    /// the resulting ideal objective must sit within 0.5% of 6.785e-4 /kW,
    /// which catches mistranscribed tables.
    pub fn spread(rows: &[WindBin]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Scenario("empty wind rose".into()));
        }
        if let Some(b) = rows.iter().find(|b| !SPREAD_SPEEDS.contains(&b.speed)) {
            return Err(Error::Scenario(format!("spread rose speed {} not in {{8, 12, 17}} m/s", b.speed)));
        }
        let total: f64 = rows.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::Scenario(format!("rose probabilities sum to {total}, not 1")));
        }
        let bins = rows.iter().map(|b| WindBin { probability: b.probability / total, ..*b }).collect();
        let scenario = WindScenario::new(bins)?;
        let ideal = ideal_objective(&scenario);
        let deviation = (ideal / SPREAD_IDEAL_OBJECTIVE - 1.0).abs();
        if deviation > SPREAD_GATE_TOL {
            return Err(Error::Scenario(format!(
                "rose implies ideal objective {ideal:.6e} /kW, {:.2}% away from {SPREAD_IDEAL_OBJECTIVE:e}",
                deviation * 100.0
            )));
        }
        Ok(scenario)
    }

    /// The bundled spread rose.
    pub fn spread_default() -> Self {
        let rows = parse_rose(DEFAULT_SPREAD_ROSE, Path::new("<bundled spread rose>")).expect("bundled rose parses");
        WindScenario::spread(&rows).expect("bundled rose passes the transcription gate")
    }

    pub fn bins(&self) -> &[WindBin] {
        &self.bins
    }

    /// `Σ p u³` over the bins.
    pub fn mean_cubed_speed(&self) -> f64 {
        self.bins.iter().map(|b| b.probability * b.speed.powi(3)).sum()
    }

    /// Expected power of one wake-free turbine, kW.
    pub fn free_stream_turbine_power(&self) -> f64 {
        POWER_COEFF * self.mean_cubed_speed()
    }
}

/// Parse rose CSV text (`direction_deg,speed_ms,probability` with header).
pub fn parse_rose(text: &str, origin: &Path) -> Result<Vec<WindBin>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, header)) if header.trim() == "direction_deg,speed_ms,probability" => {}
        Some((n, _)) => {
            return Err(Error::parse(origin, n + 1, "expected header `direction_deg,speed_ms,probability`"))
        }
        None => return Err(Error::parse(origin, 1, "empty rose file")),
    }
    lines
        .map(|(n, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::parse(origin, n + 1, format!("expected 3 fields, found {}", fields.len())));
            }
            let num =
                |s: &str| s.parse::<f64>().map_err(|e| Error::parse(origin, n + 1, format!("bad number `{s}`: {e}")));
            Ok(WindBin { direction: num(fields[0])?, speed: num(fields[1])?, probability: num(fields[2])? })
        })
        .collect()
}

/// Probability-weighted farm power in kW, evaluated bin by bin in order.
pub fn expected_power(
    genome: &Genome,
    layout: &CandidateLayout,
    scenario: &WindScenario,
    spec: &TurbineSpec,
) -> Result<f64> {
    let turbines = layout.active_positions(genome)?;
    if turbines.is_empty() {
        return Ok(0.0);
    }
    Ok(scenario
        .bins()
        .iter()
        .map(|b| b.probability * total_power(&effective_speeds(&turbines, b.direction, b.speed, spec)))
        .sum())
}
