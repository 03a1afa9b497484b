//! Jensen top-hat wake physics.
//!
//! A turbine's wake is a cylinder of reduced speed whose radius grows
//! linearly downstream, `r_w = r_1 + α_e x`. Multiple wakes combine by
//! summing squared deficit velocities, each scaled by the fraction of the
//! downstream rotor disc it covers.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::layout::CandidateLayout;

/// Power curve coefficient: `P = 0.3 U³` kW.
pub const POWER_COEFF: f64 = 0.3;

/// Tolerance used when classifying overlap-area branches.
const BRANCH_TOL: f64 = 1e-12;

/// A point in the fixed farm frame: `x` east, `y` north, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Rotor geometry plus the wake constants derived from it.
///
/// The derived fields are private and only ever set by [`TurbineSpec::new`],
/// so they cannot drift from their inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurbineSpec {
    rotor_radius: f64,
    hub_height: f64,
    roughness: f64,
    thrust_coeff: f64,
    axial_induction: f64,
    initial_wake_radius: f64,
    entrainment: f64,
}

impl TurbineSpec {
    pub fn new(rotor_radius: f64, hub_height: f64, roughness: f64, thrust_coeff: f64) -> Result<Self> {
        if !(rotor_radius > 0.0) || !rotor_radius.is_finite() {
            return Err(Error::InvalidParameter(format!("rotor radius must be positive, got {rotor_radius}")));
        }
        if !(thrust_coeff > 0.0 && thrust_coeff < 1.0) {
            return Err(Error::InvalidParameter(format!("thrust coefficient must lie in (0, 1), got {thrust_coeff}")));
        }
        let entrainment = entrainment_constant(hub_height, roughness)?;
        let axial_induction = axial_induction(thrust_coeff)?;
        let initial_wake_radius = initial_wake_radius(rotor_radius, axial_induction)?;
        Ok(TurbineSpec {
            rotor_radius,
            hub_height,
            roughness,
            thrust_coeff,
            axial_induction,
            initial_wake_radius,
            entrainment,
        })
    }

    pub fn rotor_radius(&self) -> f64 {
        self.rotor_radius
    }

    pub fn hub_height(&self) -> f64 {
        self.hub_height
    }

    pub fn roughness(&self) -> f64 {
        self.roughness
    }

    pub fn thrust_coeff(&self) -> f64 {
        self.thrust_coeff
    }

    pub fn axial_induction(&self) -> f64 {
        self.axial_induction
    }

    pub fn initial_wake_radius(&self) -> f64 {
        self.initial_wake_radius
    }

    pub fn entrainment(&self) -> f64 {
        self.entrainment
    }

    pub fn rotor_area(&self) -> f64 {
        PI * self.rotor_radius * self.rotor_radius
    }

    /// Wake radius at `downstream` meters behind the rotor.
    pub fn wake_radius(&self, downstream: f64) -> f64 {
        self.initial_wake_radius + self.entrainment * downstream
    }

    /// Deficit without the sign check, for callers that already filtered `x >= 0`.
    pub(crate) fn deficit_unchecked(&self, x: f64) -> f64 {
        let expansion = 1.0 + self.entrainment * x / self.initial_wake_radius;
        (1.0 - (1.0 - self.thrust_coeff).sqrt()) / (expansion * expansion)
    }
}

impl Default for TurbineSpec {
    /// 40 m rotor on a 60 m hub over 0.3 m roughness, `C_T = 0.88`.
    fn default() -> Self {
        TurbineSpec::new(20.0, 60.0, 0.3, 0.88).expect("reference turbine is valid")
    }
}

/// Wake expansion rate `0.5 / ln(z_h / z_0)`.
pub fn entrainment_constant(hub_height: f64, roughness: f64) -> Result<f64> {
    if !(hub_height > 0.0) || !(roughness > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "hub height and roughness must be positive, got z_h={hub_height}, z_0={roughness}"
        )));
    }
    if hub_height <= roughness {
        return Err(Error::InvalidParameter(format!(
            "hub height {hub_height} must exceed roughness length {roughness}"
        )));
    }
    Ok(0.5 / (hub_height / roughness).ln())
}

/// Axial induction from one-dimensional momentum theory, `(1 - √(1 - C_T)) / 2`.
pub fn axial_induction(thrust_coeff: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&thrust_coeff) {
        return Err(Error::InvalidParameter(format!("thrust coefficient must lie in [0, 1], got {thrust_coeff}")));
    }
    Ok((1.0 - (1.0 - thrust_coeff).sqrt()) / 2.0)
}

/// Wake radius immediately behind the rotor, `r √((1 - a) / (1 - 2a))`.
pub fn initial_wake_radius(rotor_radius: f64, induction: f64) -> Result<f64> {
    if !(rotor_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("rotor radius must be positive, got {rotor_radius}")));
    }
    if !(0.0..0.5).contains(&induction) {
        return Err(Error::InvalidParameter(format!(
            "axial induction must lie in [0, 0.5) for a finite wake radius, got {induction}"
        )));
    }
    Ok(rotor_radius * ((1.0 - induction) / (1.0 - 2.0 * induction)).sqrt())
}

/// Fractional speed deficit `ΔU/U` at `x` meters behind a rotor.
pub fn single_wake_deficit(x: f64, spec: &TurbineSpec) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::InvalidParameter(format!("downstream distance must be nonnegative, got {x}")));
    }
    Ok(spec.deficit_unchecked(x))
}

/// Coordinates of one point relative to another, in the wind-aligned frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindFramePosition {
    /// Positive when the point lies downwind of the origin turbine.
    pub downstream: f64,
    pub crosswind: f64,
}

/// Express `pos_i` relative to `pos_j` in the frame of a wind blowing *from*
/// bearing `wind_dir` degrees (0 = north, 90 = east).
///
/// The wind travels along `(-sin φ, -cos φ)`; the crosswind axis is
/// `(cos φ, -sin φ)`, so the map is a pure rotation.
pub fn relative_in_wind_frame(pos_i: Point, pos_j: Point, wind_dir: f64) -> WindFramePosition {
    let (sin, cos) = wind_dir.to_radians().sin_cos();
    let dx = pos_i.x - pos_j.x;
    let dy = pos_i.y - pos_j.y;
    WindFramePosition { downstream: -dx * sin - dy * cos, crosswind: dx * cos - dy * sin }
}

/// Area of a rotor disc of radius `r` covered by a wake of radius `r_w`
/// whose axis is `d` meters away.
///
/// When `d <= |r_w - r|` the full rotor area is returned, including the
/// (physically unreachable) case `r_w < r`.
pub fn overlap_area(d: f64, r: f64, r_w: f64) -> f64 {
    let d = d.abs();
    if d >= r + r_w - BRANCH_TOL {
        return 0.0;
    }
    if d <= (r_w - r).abs() + BRANCH_TOL {
        return PI * r * r;
    }
    let d1 = (r_w * r_w + d * d - r * r) / (2.0 * d);
    let d2 = d - d1;
    let theta1 = 2.0 * (d1 / r_w).clamp(-1.0, 1.0).acos();
    let theta2 = 2.0 * (d2 / r).clamp(-1.0, 1.0).acos();
    let area = 0.5 * r_w * r_w * (theta1 - theta1.sin()) + 0.5 * r * r * (theta2 - theta2.sin());
    area.clamp(0.0, PI * r * r)
}

/// Rotor-area fraction covered by the wake and the wake's fractional
/// deficit, for a rotor at `rel` behind an upwind turbine. `None` when the
/// rotor is not downwind or the wake misses it.
fn wake_overlap(rel: WindFramePosition, spec: &TurbineSpec) -> Option<(f64, f64)> {
    if !(rel.downstream > 0.0) {
        return None;
    }
    let area = overlap_area(rel.crosswind, spec.rotor_radius(), spec.wake_radius(rel.downstream));
    if area <= 0.0 {
        return None;
    }
    Some((area / spec.rotor_area(), spec.deficit_unchecked(rel.downstream)))
}

/// Scaled deficit `(A_w / πr²) · ΔU/U` that an upwind rotor imposes on a
/// rotor at relative position `rel`; zero when `rel` is not downwind or the
/// wake misses the rotor.
pub fn wake_fraction(rel: WindFramePosition, spec: &TurbineSpec) -> f64 {
    wake_overlap(rel, spec).map_or(0.0, |(area_ratio, deficit)| area_ratio * deficit)
}

/// Speed at turbine `i` of the active set `turbines` under a wind of
/// `free_stream` m/s from `wind_dir` degrees.
pub fn effective_speed(i: usize, turbines: &[Point], wind_dir: f64, free_stream: f64, spec: &TurbineSpec) -> f64 {
    let target = turbines[i];
    let mut sum_sq = 0.0;
    for (j, &source) in turbines.iter().enumerate() {
        if j == i {
            continue;
        }
        let rel = relative_in_wind_frame(target, source, wind_dir);
        if let Some((area_ratio, deficit)) = wake_overlap(rel, spec) {
            let wake_speed = free_stream * (1.0 - deficit);
            let term = area_ratio * (free_stream - wake_speed);
            sum_sq += term * term;
        }
    }
    if sum_sq == 0.0 {
        return free_stream;
    }
    (free_stream - sum_sq.sqrt()).max(0.0)
}

/// Effective speeds of every turbine in `turbines`, in order.
pub fn effective_speeds(turbines: &[Point], wind_dir: f64, free_stream: f64, spec: &TurbineSpec) -> Vec<f64> {
    (0..turbines.len()).map(|i| effective_speed(i, turbines, wind_dir, free_stream, spec)).collect()
}

/// Farm power in kW, `Σ 0.3 U_i³`.
pub fn total_power(speeds: &[f64]) -> f64 {
    speeds.iter().map(|u| POWER_COEFF * u * u * u).sum()
}

/// Regular sampling grid: `nx × ny` square cells of side `cell_size`
/// starting at `origin` (lower-left corner).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Point,
    pub cell_size: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Grid of `resolution` cells across the farm width, square cells,
    /// enough rows to cover the farm height.
    pub fn covering(width: f64, height: f64, resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::InvalidParameter(format!("grid resolution must be at least 2, got {resolution}")));
        }
        let cell_size = width / resolution as f64;
        let ny = ((height / cell_size) - 1e-9).ceil().max(2.0) as usize;
        Ok(GridSpec { origin: Point::new(0.0, 0.0), cell_size, nx: resolution, ny })
    }

    pub fn cell_center(&self, ix: usize, iy: usize) -> Point {
        Point::new(
            self.origin.x + (ix as f64 + 0.5) * self.cell_size,
            self.origin.y + (iy as f64 + 0.5) * self.cell_size,
        )
    }
}

/// Speeds sampled at cell centers, row-major with `x` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    pub grid: GridSpec,
    pub values: Vec<f64>,
}

impl VelocityGrid {
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.grid.nx + ix]
    }

    /// `(center, speed)` for every cell in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        (0..self.grid.ny)
            .flat_map(move |iy| (0..self.grid.nx).map(move |ix| (self.grid.cell_center(ix, iy), self.get(ix, iy))))
    }
}

/// Superposed wake field of the active turbines sampled with zero-radius
/// probes: a probe counts a wake fully when it lies inside the wake cone.
pub fn velocity_field(
    genome: &Genome,
    layout: &CandidateLayout,
    wind_dir: f64,
    free_stream: f64,
    spec: &TurbineSpec,
    grid: GridSpec,
) -> Result<VelocityGrid> {
    if grid.nx == 0 || grid.ny == 0 || !(grid.cell_size > 0.0) {
        return Err(Error::InvalidParameter("velocity grid must have at least one cell".into()));
    }
    let turbines = layout.active_positions(genome)?;
    let mut values = Vec::with_capacity(grid.nx * grid.ny);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let probe = grid.cell_center(ix, iy);
            let mut sum_sq = 0.0;
            for &source in &turbines {
                let rel = relative_in_wind_frame(probe, source, wind_dir);
                if rel.downstream > 0.0 && rel.crosswind.abs() <= spec.wake_radius(rel.downstream) {
                    let deficit = free_stream * spec.deficit_unchecked(rel.downstream);
                    sum_sq += deficit * deficit;
                }
            }
            values.push(if sum_sq == 0.0 { free_stream } else { (free_stream - sum_sq.sqrt()).max(0.0) });
        }
    }
    Ok(VelocityGrid { grid, values })
}
