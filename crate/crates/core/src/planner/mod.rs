//! Any-angle global planning on the occupancy grid (26-connected in 3D,
//! 8-connected on a 2D slice) and a validate-and-replan local layer.

mod replan;
mod search;

pub use replan::{validate_and_replan, ReplanOutcome};
pub use search::Algorithm;

use crate::geometry::Vec3;
use crate::world_model::{
    nearest_occupied_distance_field, Cell, GridGeometry, VoxelGrid, WorldError,
};
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("no path from start to goal")]
    Unreachable,
    #[error("start {0:?} is occupied after inflation")]
    StartOccupied(Vec3),
    #[error("goal {0:?} is occupied after inflation")]
    GoalOccupied(Vec3),
    #[error("position {0:?} lies outside the map")]
    OutOfBounds(Vec3),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error(transparent)]
    World(#[from] WorldError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMode {
    TwoD,
    ThreeD,
}

#[derive(Debug, Clone)]
pub struct PlanRequest<'a> {
    pub start: Vec3,
    pub goal: Vec3,
    pub map: &'a VoxelGrid,
    pub inflation_radius: f64,
    pub mode: PlanMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub waypoints: Vec<Vec3>,
    pub total_length: f64,
    pub los_checks: u64,
    pub expansions: u64,
}

impl Path {
    pub fn from_waypoints(waypoints: Vec<Vec3>) -> Self {
        let total_length = polyline_length(&waypoints);
        Self { waypoints, total_length, los_checks: 0, expansions: 0 }
    }

    pub fn start(&self) -> Option<&Vec3> {
        self.waypoints.first()
    }

    pub fn goal(&self) -> Option<&Vec3> {
        self.waypoints.last()
    }

    /// `index,x,y,z` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,x,y,z")?;
        for (i, p) in self.waypoints.iter().enumerate() {
            writeln!(w, "{i},{},{},{}", p.x, p.y, p.z)?;
        }
        Ok(())
    }
}

pub fn polyline_length(pts: &[Vec3]) -> f64 {
    pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

/// Marks every voxel whose center lies within `radius` of an occupied voxel
/// center.
pub fn inflate(map: &VoxelGrid, radius: f64) -> VoxelGrid {
    if !(radius > 0.0) || map.occupied_count() == 0 {
        return map.clone();
    }
    let Ok(df) = nearest_occupied_distance_field(map) else {
        return map.clone();
    };
    let limit = radius + 1e-9 * map.resolution();
    let occ = df.values().iter().map(|&d| d <= limit).collect();
    VoxelGrid::from_occupancy(*map.geometry(), occ).expect("same geometry")
}

/// Inflated (and for 2D, sliced) map ready for repeated queries. Build once
/// per robot and reuse it across plans.
#[derive(Debug, Clone)]
pub struct PlanningGrid {
    map: VoxelGrid,
    mode: PlanMode,
    radius: f64,
}

impl PlanningGrid {
    /// In 2D mode the layer containing `layer_z` is sliced before inflating.
    pub fn new(map: &VoxelGrid, radius: f64, mode: PlanMode, layer_z: f64) -> Result<Self, PlanError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(PlanError::InvalidRequest(format!("inflation radius {radius}")));
        }
        let base = match mode {
            PlanMode::ThreeD => map.clone(),
            PlanMode::TwoD => {
                let layer = map
                    .layer_of(layer_z)
                    .ok_or(PlanError::OutOfBounds(Vec3::new(map.origin().x, map.origin().y, layer_z)))?;
                map.slice_z(layer)?
            }
        };
        Ok(Self { map: inflate(&base, radius), mode, radius })
    }

    /// Wraps an already inflated map.
    pub fn from_inflated(map: VoxelGrid, radius: f64, mode: PlanMode) -> Self {
        Self { map, mode, radius }
    }

    pub fn map(&self) -> &VoxelGrid {
        &self.map
    }

    pub fn mode(&self) -> PlanMode {
        self.mode
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.map.geometry()
    }

    /// Moves a query onto the planning layer in 2D mode.
    pub fn project(&self, p: &Vec3) -> Vec3 {
        match self.mode {
            PlanMode::ThreeD => *p,
            PlanMode::TwoD => {
                let g = self.geometry();
                let z = if g.world_to_cell(p).is_some() { p.z } else { g.origin.z + 0.5 * g.resolution };
                Vec3::new(p.x, p.y, z)
            }
        }
    }

    pub(crate) fn free_cell(&self, p: &Vec3) -> Option<Cell> {
        let c = self.geometry().world_to_cell(p)?;
        (!self.map.is_occupied(c)).then_some(c)
    }

    /// Copy with the given world points stamped as obstacles and inflated
    /// by the same radius.
    pub fn with_obstacles(&self, points: &[Vec3]) -> PlanningGrid {
        let mut map = self.map.clone();
        let g = *self.geometry();
        let reach = (self.radius / g.resolution).floor() as i64 + 1;
        let limit = self.radius + 1e-9 * g.resolution;
        for p in points {
            let p = self.project(p);
            let Some(c) = g.world_to_cell(&p) else { continue };
            let center = g.cell_center(c);
            for dz in -reach..=reach {
                for dy in -reach..=reach {
                    for dx in -reach..=reach {
                        let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                        if (0..3).any(|k| n[k] < 0 || n[k] >= g.dims[k] as i64) {
                            continue;
                        }
                        let n = [n[0] as usize, n[1] as usize, n[2] as usize];
                        if (g.cell_center(n) - center).norm() <= limit {
                            map.set(n, true);
                        }
                    }
                }
            }
        }
        PlanningGrid { map, mode: self.mode, radius: self.radius }
    }

    pub fn plan(&self, start: &Vec3, goal: &Vec3, algo: Algorithm) -> Result<Path, PlanError> {
        let start = self.project(start);
        let mut goal = self.project(goal);
        if self.mode == PlanMode::TwoD {
            goal.z = start.z;
        }
        search::run(self, start, goal, algo)
    }
}

fn plan_with(req: &PlanRequest, algo: Algorithm) -> Result<Path, PlanError> {
    PlanningGrid::new(req.map, req.inflation_radius, req.mode, req.start.z)?
        .plan(&req.start, &req.goal, algo)
}

pub fn plan_lazy_theta_star(req: &PlanRequest) -> Result<Path, PlanError> {
    plan_with(req, Algorithm::LazyThetaStar)
}

pub fn plan_theta_star(req: &PlanRequest) -> Result<Path, PlanError> {
    plan_with(req, Algorithm::ThetaStar)
}

pub fn plan_a_star(req: &PlanRequest) -> Result<Path, PlanError> {
    plan_with(req, Algorithm::AStar)
}

/// One row of the planner benchmark report.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRecord {
    pub instance: String,
    pub algorithm: String,
    pub length: f64,
    pub expansions: u64,
    pub los_checks: u64,
    pub runtime_ms: f64,
}

/// Plans with all three algorithms and records one row each.
pub fn benchmark_instance(
    instance: &str,
    grid: &PlanningGrid,
    start: &Vec3,
    goal: &Vec3,
) -> Result<Vec<BenchRecord>, PlanError> {
    [Algorithm::AStar, Algorithm::ThetaStar, Algorithm::LazyThetaStar]
        .into_iter()
        .map(|algo| {
            let t = std::time::Instant::now();
            let p = grid.plan(start, goal, algo)?;
            Ok(BenchRecord {
                instance: instance.to_string(),
                algorithm: algo.name().to_string(),
                length: p.total_length,
                expansions: p.expansions,
                los_checks: p.los_checks,
                runtime_ms: t.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}
