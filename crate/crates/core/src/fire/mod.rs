//! Fire detection in thermal images, range association and multi-view
//! triangulation with a position Information Filter.

mod assoc;
mod belief;
mod camera;
mod exact;
mod segment;
mod tracker;

pub use assoc::{associate_range, RangeAssociation, RangeSource};
pub use belief::{if_update, merge_beliefs, FireBelief, FireMeasurement};
pub use camera::{pixel_to_ray, project, Intrinsics, Ray, ThermalImage};
pub use exact::ExactSum;
pub use segment::{segment_fire, FireDetection};
pub use tracker::{fuse_tracks, write_fire_report, FireTracker, TrackedFire, FIRE_REPORT_HEADER};

use thiserror::Error;

pub const SENSOR_MIN_C: f64 = -40.0;
pub const SENSOR_MAX_C: f64 = 330.0;

#[derive(Debug, Error, PartialEq)]
pub enum FireError {
    #[error("measurement covariance is singular")]
    SingularCovariance,
    #[error("invalid thermal image: {0}")]
    InvalidImage(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FireConfig {
    /// Segmentation threshold, degrees Celsius.
    pub threshold: f64,
    pub min_pixels: usize,
    /// Half-angle of the cone used to pick LIDAR points for a ray, radians.
    pub angular_window: f64,
    /// LIDAR range standard deviation at `r0`.
    pub sigma_lidar: f64,
    pub r0: f64,
    /// Range standard deviation when the map raycast supplies the range.
    pub sigma_fallback: f64,
    /// Bearing standard deviation, radians; gives the lateral spread.
    pub sigma_bearing: f64,
    pub max_range: f64,
    /// Mahalanobis gate for data association.
    pub gate: f64,
}

impl Default for FireConfig {
    fn default() -> Self {
        Self {
            threshold: 100.0,
            min_pixels: 4,
            angular_window: 1.5f64.to_radians(),
            sigma_lidar: 0.1,
            r0: 5.0,
            sigma_fallback: 2.0,
            sigma_bearing: 0.005,
            max_range: 30.0,
            gate: 3.0,
        }
    }
}

impl FireConfig {
    pub fn validate(&self) -> Result<(), FireError> {
        let bad = |m: &str| Err(FireError::InvalidConfig(m.to_string()));
        if !(SENSOR_MIN_C..=SENSOR_MAX_C).contains(&self.threshold) {
            return bad("threshold outside sensor range");
        }
        if self.min_pixels == 0 {
            return bad("min_pixels must be positive");
        }
        for (v, name) in [
            (self.angular_window, "angular_window"),
            (self.sigma_lidar, "sigma_lidar"),
            (self.r0, "r0"),
            (self.sigma_fallback, "sigma_fallback"),
            (self.sigma_bearing, "sigma_bearing"),
            (self.max_range, "max_range"),
            (self.gate, "gate"),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(&format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}
