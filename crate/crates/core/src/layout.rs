//! Candidate turbine positions.
//!
//! Every generator is a pure function of its arguments; the order of
//! `positions` is the gene order of genomes over the layout.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::genome::Genome;
use crate::wake::Point;

/// Golden angle in degrees, `180 (3 - √5)`.
pub const GOLDEN_ANGLE_DEG: f64 = 137.507_764_050_037_85;

/// Candidate draws around each active point before it is retired.
const POISSON_ATTEMPTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayoutKind {
    Aligned,
    Staggered,
    Sunflower,
    Unstructured,
    /// Positions read from a file rather than generated.
    Custom,
}

impl LayoutKind {
    pub const GENERATED: [LayoutKind; 4] =
        [LayoutKind::Aligned, LayoutKind::Staggered, LayoutKind::Sunflower, LayoutKind::Unstructured];

    pub fn as_str(&self) -> &'static str {
        match self {
            LayoutKind::Aligned => "aligned",
            LayoutKind::Staggered => "staggered",
            LayoutKind::Sunflower => "sunflower",
            LayoutKind::Unstructured => "unstructured",
            LayoutKind::Custom => "custom",
        }
    }
}

impl fmt::Display for LayoutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for LayoutKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aligned" => Ok(LayoutKind::Aligned),
            "staggered" => Ok(LayoutKind::Staggered),
            "sunflower" => Ok(LayoutKind::Sunflower),
            "unstructured" => Ok(LayoutKind::Unstructured),
            _ => Err(Error::InvalidParameter(format!(
                "unknown layout kind `{s}` (expected aligned, staggered, sunflower or unstructured)"
            ))),
        }
    }
}

/// Rectangular farm `[0, width] × [0, height]`, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extent {
    pub width: f64,
    pub height: f64,
}

impl Extent {
    pub const fn new(width: f64, height: f64) -> Self {
        Extent { width, height }
    }

    pub fn square(side: f64) -> Self {
        Extent::new(side, side)
    }

    pub fn contains(&self, p: Point) -> bool {
        (0.0..=self.width).contains(&p.x) && (0.0..=self.height).contains(&p.y)
    }

    pub fn center(&self) -> Point {
        Point::new(self.width / 2.0, self.height / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }
}

/// How a layout's positions were produced.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LayoutParams {
    Aligned { spacing: f64 },
    Staggered { spacing: f64 },
    Sunflower { count: usize },
    Unstructured { min_dist: f64, seed: u64 },
    Custom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateLayout {
    pub params: LayoutParams,
    pub extent: Extent,
    pub positions: Vec<Point>,
}

impl CandidateLayout {
    /// Wrap externally supplied positions, checking they lie in the farm.
    pub fn custom(extent: Extent, positions: Vec<Point>) -> Result<Self> {
        if let Some(p) = positions.iter().find(|p| !extent.contains(**p)) {
            return Err(Error::OutOfExtent { x: p.x, y: p.y, width: extent.width, height: extent.height });
        }
        Ok(CandidateLayout { params: LayoutParams::Custom, extent, positions })
    }

    pub fn kind(&self) -> LayoutKind {
        match self.params {
            LayoutParams::Aligned { .. } => LayoutKind::Aligned,
            LayoutParams::Staggered { .. } => LayoutKind::Staggered,
            LayoutParams::Sunflower { .. } => LayoutKind::Sunflower,
            LayoutParams::Unstructured { .. } => LayoutKind::Unstructured,
            LayoutParams::Custom => LayoutKind::Custom,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn check_genome(&self, genome: &Genome) -> Result<()> {
        if genome.len() != self.len() {
            return Err(Error::LengthMismatch { genome: genome.len(), layout: self.len() });
        }
        Ok(())
    }

    /// Positions of the turbines a genome switches on, in layout order.
    pub fn active_positions(&self, genome: &Genome) -> Result<Vec<Point>> {
        self.check_genome(genome)?;
        Ok(genome.active_indices().map(|i| self.positions[i]).collect())
    }
}

fn check_grid_args(extent: Extent, spacing: f64) -> Result<()> {
    if !(spacing > 0.0) || !spacing.is_finite() {
        return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {spacing}")));
    }
    if extent.width < spacing || extent.height < spacing {
        return Err(Error::InvalidParameter(format!(
            "farm {} x {} m is smaller than one {spacing} m grid cell",
            extent.width, extent.height
        )));
    }
    Ok(())
}

fn cells(len: f64, spacing: f64) -> usize {
    // tolerate 2000 / 200 landing a hair under 10
    ((len / spacing) + 1e-9).floor() as usize
}

/// Cell centers of a square lattice, row-major from the south-west corner.
pub fn aligned_grid(extent: Extent, spacing: f64) -> Result<CandidateLayout> {
    check_grid_args(extent, spacing)?;
    let (nx, ny) = (cells(extent.width, spacing), cells(extent.height, spacing));
    let mut positions = Vec::with_capacity(nx * ny);
    for row in 0..ny {
        for col in 0..nx {
            positions.push(Point::new((col as f64 + 0.5) * spacing, (row as f64 + 0.5) * spacing));
        }
    }
    Ok(CandidateLayout { params: LayoutParams::Aligned { spacing }, extent, positions })
}

/// Aligned lattice with every odd row shifted east by half a cell; shifted
/// points that would leave the farm are dropped.
pub fn staggered_grid(extent: Extent, spacing: f64) -> Result<CandidateLayout> {
    check_grid_args(extent, spacing)?;
    let (nx, ny) = (cells(extent.width, spacing), cells(extent.height, spacing));
    let mut positions = Vec::with_capacity(nx * ny);
    for row in 0..ny {
        let shift = if row % 2 == 1 { spacing / 2.0 } else { 0.0 };
        for col in 0..nx {
            let p = Point::new((col as f64 + 0.5) * spacing + shift, (row as f64 + 0.5) * spacing);
            if p.x <= extent.width + 1e-9 {
                positions.push(Point::new(p.x.min(extent.width), p.y));
            }
        }
    }
    Ok(CandidateLayout { params: LayoutParams::Staggered { spacing }, extent, positions })
}

/// Vogel spiral of `count` points centered on the farm, scaled so the last
/// point sits on the inscribed circle.
pub fn sunflower_layout(extent: Extent, count: usize) -> Result<CandidateLayout> {
    if count == 0 {
        return Err(Error::InvalidParameter("sunflower layout needs at least one point".into()));
    }
    let center = extent.center();
    let radius = extent.width.min(extent.height) / 2.0;
    let scale = radius / (count as f64).sqrt();
    let step = GOLDEN_ANGLE_DEG.to_radians();
    let positions = (1..=count)
        .map(|k| {
            let rho = scale * (k as f64).sqrt();
            let (sin, cos) = (k as f64 * step).sin_cos();
            Point::new(
                (center.x + rho * cos).clamp(0.0, extent.width),
                (center.y + rho * sin).clamp(0.0, extent.height),
            )
        })
        .collect();
    Ok(CandidateLayout { params: LayoutParams::Sunflower { count }, extent, positions })
}

/// Saturated Poisson-disk sample (Bridson dart throwing) with pairwise
/// distance at least `min_dist`.
pub fn unstructured_layout(extent: Extent, min_dist: f64, seed: u64) -> Result<CandidateLayout> {
    if !(min_dist > 0.0) || !min_dist.is_finite() {
        return Err(Error::InvalidParameter(format!("minimum distance must be positive, got {min_dist}")));
    }
    if min_dist > extent.diagonal() {
        return Err(Error::InvalidParameter(format!(
            "minimum distance {min_dist} exceeds the farm diagonal {}",
            extent.diagonal()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = BackgroundGrid::new(extent, min_dist);
    let mut positions: Vec<Point> = Vec::new();
    let mut active: Vec<usize> = Vec::new();

    let first = Point::new(rng.gen::<f64>() * extent.width, rng.gen::<f64>() * extent.height);
    grid.insert(first, 0);
    positions.push(first);
    active.push(0);

    while !active.is_empty() {
        let slot = rng.gen_range(0..active.len());
        let origin = positions[active[slot]];
        let mut placed = false;
        for _ in 0..POISSON_ATTEMPTS {
            // uniform by area over the annulus [min_dist, 2 min_dist]
            let rho = (rng.gen_range(1.0..4.0) * min_dist * min_dist).sqrt();
            let angle = rng.gen::<f64>() * 2.0 * PI;
            let candidate = Point::new(origin.x + rho * angle.cos(), origin.y + rho * angle.sin());
            if extent.contains(candidate) && !grid.has_neighbor(candidate, &positions) {
                grid.insert(candidate, positions.len());
                active.push(positions.len());
                positions.push(candidate);
                placed = true;
                break;
            }
        }
        if !placed {
            active.swap_remove(slot);
        }
    }
    Ok(CandidateLayout { params: LayoutParams::Unstructured { min_dist, seed }, extent, positions })
}

/// Acceleration grid whose cells hold at most one sample.
struct BackgroundGrid {
    cell: f64,
    nx: usize,
    ny: usize,
    min_dist: f64,
    slots: Vec<Option<usize>>,
}

impl BackgroundGrid {
    fn new(extent: Extent, min_dist: f64) -> Self {
        let cell = min_dist / std::f64::consts::SQRT_2;
        let nx = (extent.width / cell).floor() as usize + 1;
        let ny = (extent.height / cell).floor() as usize + 1;
        BackgroundGrid { cell, nx, ny, min_dist, slots: vec![None; nx * ny] }
    }

    fn index(&self, p: Point) -> (usize, usize) {
        let ix = ((p.x / self.cell) as usize).min(self.nx - 1);
        let iy = ((p.y / self.cell) as usize).min(self.ny - 1);
        (ix, iy)
    }

    fn insert(&mut self, p: Point, id: usize) {
        let (ix, iy) = self.index(p);
        self.slots[iy * self.nx + ix] = Some(id);
    }

    fn has_neighbor(&self, p: Point, positions: &[Point]) -> bool {
        let (ix, iy) = self.index(p);
        let x_range = ix.saturating_sub(2)..=(ix + 2).min(self.nx - 1);
        for y in iy.saturating_sub(2)..=(iy + 2).min(self.ny - 1) {
            for x in x_range.clone() {
                if let Some(id) = self.slots[y * self.nx + x] {
                    if positions[id].distance(&p) < self.min_dist {
                        return true;
                    }
                }
            }
        }
        false
    }
}
