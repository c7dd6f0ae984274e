//! Deterministic discrete-time world: building generation, ground-truth
//! kinematics, sensor synthesis, the per-tick loop and run reports.
//!
//! Estimators only ever see what the sensor functions return; ground truth
//! stays inside [`Simulation`].

mod building;
mod kinematics;
mod report;
mod rng;
mod runner;
mod scenario;
mod sensors;
mod tasks;
mod thermal;

pub use building::{generate_building, BuildingParams, Opening, Side};
pub use kinematics::{face, pursue, scripted_step, step, Command, MotionLimits, Pursuit};
pub use report::{compute_report, FireOutcome, RobotReport, RunReport};
pub use rng::{splitmix64, substream, substream_seed, Stream};
pub use runner::{run_scenario, RobotHistory, Simulation};
pub use scenario::{FireKind, FireSpec, MissionMode, MissionParams, NoiseParams, RobotConfig, Scenario};
pub use sensors::{
    synth_altimeter, synth_gps, synth_imu, synth_lidar, synth_odometry, true_delta, BeamPattern,
    ImuNoise, OdomNoise,
};
pub use thermal::{synth_thermal, visible, FireSpot, ThermalCamera, AMBIENT_C};

use crate::geometry::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid building: {0}")]
    InvalidBuilding(String),
    #[error("scenario line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("malformed log {file}: {msg}")]
    Log { file: String, msg: String },
    #[error(transparent)]
    World(#[from] crate::world_model::WorldError),
    #[error(transparent)]
    Mcl(#[from] crate::mcl::MclError),
    #[error(transparent)]
    Bt(#[from] crate::executive::BtError),
    #[error(transparent)]
    Coord(#[from] crate::coordination::CoordError),
    #[error(transparent)]
    Plan(#[from] crate::planner::PlanError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Axis-aligned box, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    pub fn expanded(&self, m: f64) -> Aabb {
        let d = Vec3::repeat(m);
        Aabb::new(self.min - d, self.max + d)
    }

    pub fn center(&self) -> Vec3 {
        0.5 * (self.min + self.max)
    }

    /// Closest point of the box to `p`.
    pub fn clamp(&self, p: &Vec3) -> Vec3 {
        Vec3::new(
            p.x.clamp(self.min.x, self.max.x),
            p.y.clamp(self.min.y, self.max.y),
            p.z.clamp(self.min.z, self.max.z),
        )
    }
}
