//! The nine benchmark cases: three farm/spacing sets × three wind climates.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evaluation::{ideal_objective, objective, EvaluationResult};
use crate::genome::Genome;
use crate::layout::{
    aligned_grid, staggered_grid, sunflower_layout, unstructured_layout, CandidateLayout, Extent, LayoutKind,
};
use crate::wake::{Point, TurbineSpec};
use crate::wind::{expected_power, WindScenario};

/// Rotor diameter of the reference turbine, meters.
pub const ROTOR_DIAMETER: f64 = 40.0;

/// Minimum distance of the unstructured candidates relative to the grid
/// spacing. A saturated Poisson-disk sample holds about 0.673 points per
/// `min_dist²`, so scaling by its square root gives about as many candidates
/// as the aligned grid.
pub const UNSTRUCTURED_SPACING_FACTOR: f64 = 0.82;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WindCondition {
    Unidirectional,
    Omnidirectional,
    Spread,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseId {
    IA,
    IB,
    IC,
    IIA,
    IIB,
    IIC,
    IIIA,
    IIIB,
    IIIC,
}

impl CaseId {
    pub const ALL: [CaseId; 9] = [
        CaseId::IA,
        CaseId::IB,
        CaseId::IC,
        CaseId::IIA,
        CaseId::IIB,
        CaseId::IIC,
        CaseId::IIIA,
        CaseId::IIIB,
        CaseId::IIIC,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseId::IA => "IA",
            CaseId::IB => "IB",
            CaseId::IC => "IC",
            CaseId::IIA => "IIA",
            CaseId::IIB => "IIB",
            CaseId::IIC => "IIC",
            CaseId::IIIA => "IIIA",
            CaseId::IIIB => "IIIB",
            CaseId::IIIC => "IIIC",
        }
    }

    /// Square farm side, meters.
    pub fn farm_side(&self) -> f64 {
        match self {
            CaseId::IIIA | CaseId::IIIB | CaseId::IIIC => 6000.0,
            _ => 2000.0,
        }
    }

    pub fn extent(&self) -> Extent {
        Extent::square(self.farm_side())
    }

    /// Candidate spacing: 5D for the coarse cases, 2D for the fine ones.
    pub fn spacing(&self) -> f64 {
        match self {
            CaseId::IIA | CaseId::IIB | CaseId::IIC => 2.0 * ROTOR_DIAMETER,
            _ => 5.0 * ROTOR_DIAMETER,
        }
    }

    pub fn wind(&self) -> WindCondition {
        match self {
            CaseId::IA | CaseId::IIA | CaseId::IIIA => WindCondition::Unidirectional,
            CaseId::IB | CaseId::IIB | CaseId::IIIB => WindCondition::Omnidirectional,
            CaseId::IC | CaseId::IIC | CaseId::IIIC => WindCondition::Spread,
        }
    }

    /// Wind climate of the case; `spread_rose` replaces the bundled rose.
    pub fn scenario(&self, spread_rose: Option<&WindScenario>) -> WindScenario {
        match self.wind() {
            WindCondition::Unidirectional => WindScenario::unidirectional(),
            WindCondition::Omnidirectional => WindScenario::omnidirectional(),
            WindCondition::Spread => spread_rose.cloned().unwrap_or_else(WindScenario::spread_default),
        }
    }

    /// Candidate positions of `kind` for this case. Sunflower and
    /// unstructured layouts get about as many points as the aligned grid.
    pub fn layout(&self, kind: LayoutKind, layout_seed: u64) -> Result<CandidateLayout> {
        let extent = self.extent();
        let spacing = self.spacing();
        match kind {
            LayoutKind::Aligned => aligned_grid(extent, spacing),
            LayoutKind::Staggered => staggered_grid(extent, spacing),
            LayoutKind::Sunflower => sunflower_layout(extent, aligned_grid(extent, spacing)?.len()),
            LayoutKind::Unstructured => unstructured_layout(extent, spacing * UNSTRUCTURED_SPACING_FACTOR, layout_seed),
            LayoutKind::Custom => Err(Error::InvalidParameter("custom layouts are loaded from a file".into())),
        }
    }

    /// Evaluate a farm with a turbine at every position of `positions`.
    /// Positions outside the farm and empty farms are errors.
    pub fn evaluate_positions(
        &self,
        positions: Vec<Point>,
        spread_rose: Option<&WindScenario>,
    ) -> Result<EvaluationResult> {
        let layout = CandidateLayout::custom(self.extent(), positions)?;
        let scenario = self.scenario(spread_rose);
        let genome = Genome::ones(layout.len());
        let power = expected_power(&genome, &layout, &scenario, &TurbineSpec::default())?;
        objective(power, layout.len())?;
        Ok(EvaluationResult::from_power(power, layout.len(), &scenario, ideal_objective(&scenario)))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CaseId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownCase(s.to_string()))
    }
}
