//! Poses, rotations and angle helpers shared by every module.

use nalgebra::{Matrix3, Rotation3, Vector3};
use std::f64::consts::PI;

pub type Vec3 = Vector3<f64>;

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    if !a.is_finite() || (a > -PI && a <= PI) {
        return a;
    }
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Smallest signed difference `a - b` wrapped into `(-pi, pi]`.
pub fn angle_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// 6-DoF pose in the map frame. Angles are kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, roll: f64, pitch: f64, yaw: f64) -> Self {
        Self {
            x,
            y,
            z,
            roll: normalize_angle(roll),
            pitch: normalize_angle(pitch),
            yaw: normalize_angle(yaw),
        }
    }

    /// Level pose (zero roll and pitch).
    pub fn planar(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self::new(x, y, z, 0.0, 0.0, yaw)
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// Body-to-map rotation, `Rz(yaw) * Ry(pitch) * Rx(roll)`.
    pub fn rotation(&self) -> Matrix3<f64> {
        rotation_rpy(self.roll, self.pitch, self.yaw)
    }

    pub fn body_to_map(&self, p: &Vec3) -> Vec3 {
        self.rotation() * p + self.position()
    }

    pub fn map_to_body(&self, p: &Vec3) -> Vec3 {
        self.rotation().transpose() * (p - self.position())
    }
}

pub fn rotation_rpy(roll: f64, pitch: f64, yaw: f64) -> Matrix3<f64> {
    *Rotation3::from_euler_angles(roll, pitch, yaw).matrix()
}

/// Rotation about the z axis only.
pub fn rotation_yaw(yaw: f64) -> Matrix3<f64> {
    let (s, c) = yaw.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Roll/pitch tilt, `Ry(pitch) * Rx(roll)`.
pub fn rotation_tilt(roll: f64, pitch: f64) -> Matrix3<f64> {
    rotation_rpy(roll, pitch, 0.0)
}

/// Parses `"x,y,z"` (whitespace tolerant).
pub fn parse_vec3(s: &str) -> Option<Vec3> {
    let v = parse_floats(s)?;
    (v.len() == 3).then(|| Vec3::new(v[0], v[1], v[2]))
}

pub fn parse_floats(s: &str) -> Option<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().ok().filter(|v| v.is_finite()))
        .collect()
}

pub fn format_vec3(v: &Vec3) -> String {
    format!("{},{},{}", v.x, v.y, v.z)
}
