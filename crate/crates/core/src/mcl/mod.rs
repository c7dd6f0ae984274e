//! Monte Carlo localization against a precomputed likelihood grid.
//!
//! Particles carry `[x, y, z, yaw]`; roll and pitch come from the IMU and
//! are applied to the cloud once per update. An update cycle runs only when
//! accumulated odometry crosses a translation or rotation threshold:
//! predict, weight (LIDAR map match and horizontal GPS), fuse with `alpha`,
//! normalize, and resample when the effective sample size drops below
//! `N/2`. Altimeter and IMU yaw enter at resampling time on aerial
//! platforms.

mod filter;
mod ops;

pub use filter::{CycleOutcome, Mcl, TraceRow, TRACE_HEADER};
pub use ops::{
    effective_sample_size, estimate, fuse_and_normalize, fuse_weights, initialize,
    normalize_weights, predict, resample, should_update, weight_gps, weight_map, Estimate,
    LevelCloud,
};

use crate::geometry::{normalize_angle, rotation_yaw, Vec3};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MclError {
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("no weight source available")]
    NoWeightSource,
    #[error("all fused weights are zero (filter divergence)")]
    Divergence,
    #[error("weights are degenerate (sum {0})")]
    DegenerateWeights(f64),
    #[error("weight vector has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Particle {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub weight: f64,
}

impl Particle {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64, weight: f64) -> Self {
        Self { x, y, z, yaw: normalize_angle(yaw), weight }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

/// Fixed-size particle population.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleSet {
    pub particles: Vec<Particle>,
}

impl ParticleSet {
    pub fn new(particles: Vec<Particle>) -> Self {
        Self { particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.particles.iter().map(|p| p.weight).collect()
    }

    pub fn weight_sum(&self) -> f64 {
        self.particles.iter().map(|p| p.weight).sum()
    }
}

/// Body-frame odometry increment.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OdomDelta {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
    pub dyaw: f64,
}

impl OdomDelta {
    pub fn new(dx: f64, dy: f64, dz: f64, dyaw: f64) -> Self {
        Self { dx, dy, dz, dyaw }
    }

    pub fn is_finite(&self) -> bool {
        self.dx.is_finite() && self.dy.is_finite() && self.dz.is_finite() && self.dyaw.is_finite()
    }

    pub fn translation_norm(&self) -> f64 {
        (self.dx * self.dx + self.dy * self.dy + self.dz * self.dz).sqrt()
    }

    /// `self` followed by `next`, where `next` is expressed in the body frame
    /// reached after `self`.
    pub fn compose(&self, next: &OdomDelta) -> OdomDelta {
        let r = rotation_yaw(self.dyaw);
        let t = r * Vec3::new(next.dx, next.dy, 0.0);
        OdomDelta {
            dx: self.dx + t.x,
            dy: self.dy + t.y,
            dz: self.dz + next.dz,
            dyaw: self.dyaw + next.dyaw,
        }
    }

    /// Increment that undoes `self`.
    pub fn inverse(&self) -> OdomDelta {
        let t = rotation_yaw(-self.dyaw) * Vec3::new(self.dx, self.dy, 0.0);
        OdomDelta { dx: -t.x, dy: -t.y, dz: -self.dz, dyaw: -self.dyaw }
    }
}

/// One tick of sensor data as seen by the estimator.
#[derive(Debug, Clone, Default)]
pub struct SensorFrame {
    /// Body-frame LIDAR points.
    pub cloud: Vec<Vec3>,
    /// GPS fix already expressed in the map frame.
    pub gps: Option<Vec3>,
    pub imu_roll: f64,
    pub imu_pitch: f64,
    pub imu_yaw: f64,
    /// Height above ground.
    pub altimeter: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Platform {
    Uav,
    Ugv,
}

/// Which weight sources the filter may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    Fused,
    MapOnly,
    GpsOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MclConfig {
    pub n_particles: usize,
    pub alpha: f64,
    pub sigma_gps: f64,
    pub trans_threshold: f64,
    pub rot_threshold: f64,
    pub k_x: f64,
    pub k_y: f64,
    pub k_z: f64,
    pub k_yaw: f64,
    pub platform: Platform,
    pub yaw_resample_sigma: f64,
    pub z_resample_sigma: f64,
    pub weighting: Weighting,
    /// Cloud points kept per update (uniform stride subsampling).
    pub max_cloud_points: usize,
    /// Spread multiplier used when reinitializing after weight collapse.
    pub recovery_spread_factor: f64,
}

impl MclConfig {
    pub fn uav() -> Self {
        Self {
            n_particles: 500,
            alpha: 0.5,
            sigma_gps: 1.0,
            trans_threshold: 0.1,
            rot_threshold: 0.05,
            k_x: 0.1,
            k_y: 0.1,
            k_z: 0.1,
            k_yaw: 0.1,
            platform: Platform::Uav,
            yaw_resample_sigma: 0.01,
            z_resample_sigma: 0.05,
            weighting: Weighting::Fused,
            max_cloud_points: 400,
            recovery_spread_factor: 3.0,
        }
    }

    pub fn ugv() -> Self {
        Self { platform: Platform::Ugv, k_z: 0.0, ..Self::uav() }
    }

    pub fn validate(&self) -> Result<(), MclError> {
        let bad = |m: &str| Err(MclError::InvalidConfig(m.to_string()));
        if self.n_particles == 0 {
            return bad("n_particles must be positive");
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad("alpha must lie in [0, 1]");
        }
        if !(self.sigma_gps > 0.0) {
            return bad("sigma_gps must be positive");
        }
        if !(self.trans_threshold > 0.0 && self.rot_threshold > 0.0) {
            return bad("thresholds must be positive");
        }
        let ks = [self.k_x, self.k_y, self.k_z, self.k_yaw];
        if ks.iter().any(|k| !(*k >= 0.0 && k.is_finite())) {
            return bad("motion noise factors must be non-negative");
        }
        if !(self.yaw_resample_sigma >= 0.0 && self.z_resample_sigma >= 0.0) {
            return bad("resample sigmas must be non-negative");
        }
        if self.max_cloud_points == 0 {
            return bad("max_cloud_points must be positive");
        }
        Ok(())
    }

    /// z noise factor actually applied; ground platforms move in 2D.
    pub fn effective_k_z(&self) -> f64 {
        match self.platform {
            Platform::Uav => self.k_z,
            Platform::Ugv => 0.0,
        }
    }
}
