use super::Aabb;
use crate::geometry::{normalize_angle, rotation_yaw, Pose, Vec3};
use crate::mcl::OdomDelta;
use crate::world_model::{raycast, VoxelGrid};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

fn gauss<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        let n: f64 = StandardNormal.sample(rng);
        n * sigma
    } else {
        0.0
    }
}

/// Rotating multi-channel LIDAR. Channel elevations are spread evenly over
/// `[-vfov/2, vfov/2]`; azimuths start at the body x axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPattern {
    pub channels: usize,
    pub vertical_fov: f64,
    pub horizontal: usize,
    pub min_range: f64,
    pub max_range: f64,
}

impl Default for BeamPattern {
    fn default() -> Self {
        Self {
            channels: 16,
            vertical_fov: 30f64.to_radians(),
            horizontal: 120,
            min_range: 0.2,
            max_range: 30.0,
        }
    }
}

impl BeamPattern {
    /// A single beam along body x.
    pub fn single(max_range: f64) -> Self {
        Self { channels: 1, vertical_fov: 0.0, horizontal: 1, min_range: 0.0, max_range }
    }

    pub fn directions(&self) -> Vec<Vec3> {
        let mut out = Vec::with_capacity(self.channels * self.horizontal);
        for c in 0..self.channels {
            let e = if self.channels > 1 {
                -0.5 * self.vertical_fov + self.vertical_fov * c as f64 / (self.channels - 1) as f64
            } else {
                0.0
            };
            for h in 0..self.horizontal {
                let a = 2.0 * std::f64::consts::PI * h as f64 / self.horizontal as f64;
                out.push(Vec3::new(e.cos() * a.cos(), e.cos() * a.sin(), e.sin()));
            }
        }
        out
    }
}

/// Body-frame point cloud from one raycast per beam with Gaussian range
/// noise. Beams that hit nothing within range are dropped.
pub fn synth_lidar<R: Rng + ?Sized>(
    pose: &Pose,
    map: &VoxelGrid,
    pattern: &BeamPattern,
    sigma: f64,
    rng: &mut R,
) -> Vec<Vec3> {
    let rot = pose.rotation();
    let origin = pose.position();
    let mut cloud = Vec::new();
    for d in pattern.directions() {
        let Ok(Some(r)) = raycast(&origin, &(rot * d), pattern.max_range, map) else { continue };
        if r < pattern.min_range {
            continue;
        }
        let noisy = r + gauss(rng, sigma);
        if noisy > 0.0 {
            cloud.push(d * noisy);
        }
    }
    cloud
}

/// GPS fix, withheld inside any denied volume.
pub fn synth_gps<R: Rng + ?Sized>(position: &Vec3, denied: &[Aabb], sigma: f64, rng: &mut R) -> Option<Vec3> {
    if denied.iter().any(|b| b.contains(position)) {
        return None;
    }
    Some(position + Vec3::new(gauss(rng, sigma), gauss(rng, sigma), gauss(rng, sigma)))
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImuNoise {
    pub roll_pitch_sigma: f64,
    pub yaw_sigma: f64,
    pub yaw_bias: f64,
}

/// Roll, pitch and yaw readings.
pub fn synth_imu<R: Rng + ?Sized>(pose: &Pose, noise: &ImuNoise, rng: &mut R) -> (f64, f64, f64) {
    let roll = pose.roll + gauss(rng, noise.roll_pitch_sigma);
    let pitch = pose.pitch + gauss(rng, noise.roll_pitch_sigma);
    let yaw = normalize_angle(pose.yaw + noise.yaw_bias + gauss(rng, noise.yaw_sigma));
    (roll, pitch, yaw)
}

/// Height above flat ground at `ground_z`.
pub fn synth_altimeter<R: Rng + ?Sized>(position: &Vec3, ground_z: f64, sigma: f64, rng: &mut R) -> f64 {
    position.z - ground_z + gauss(rng, sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OdomNoise {
    /// Standard deviation per unit of motion on each component.
    pub proportional: f64,
    /// Systematic scale error on translation and rotation.
    pub drift: f64,
}

/// Exact body-frame increment from `from` to `to`.
pub fn true_delta(from: &Pose, to: &Pose) -> OdomDelta {
    let d = rotation_yaw(-from.yaw) * (to.position() - from.position());
    OdomDelta::new(d.x, d.y, to.z - from.z, normalize_angle(to.yaw - from.yaw))
}

/// Odometry increment: true delta scaled by `1 + drift` plus zero-mean
/// noise proportional to the size of each component.
pub fn synth_odometry<R: Rng + ?Sized>(from: &Pose, to: &Pose, noise: &OdomNoise, rng: &mut R) -> OdomDelta {
    let t = true_delta(from, to);
    let s = 1.0 + noise.drift;
    let k = noise.proportional;
    let mut comp = |v: f64| -> f64 {
        let n = if k > 0.0 && v != 0.0 {
            Normal::new(0.0, k * v.abs()).map(|d| d.sample(&mut *rng)).unwrap_or(0.0)
        } else {
            0.0
        };
        v * s + n
    };
    OdomDelta::new(comp(t.dx), comp(t.dy), comp(t.dz), comp(t.dyaw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mcl::Estimate;
    use nalgebra::Matrix4;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wall_map() -> VoxelGrid {
        let mut m = VoxelGrid::new(Vec3::new(-10.0, -10.0, -2.0), 0.25, [80, 80, 16]).unwrap();
        m.fill_box(Vec3::new(5.0, -10.0, -2.0), Vec3::new(5.25, 10.0, 2.0), true);
        m
    }

    #[test]
    fn single_beam_hits_wall() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cloud = synth_lidar(&Pose::default(), &wall_map(), &BeamPattern::single(20.0), 0.0, &mut rng);
        assert_eq!(cloud.len(), 1);
        assert!((cloud[0] - Vec3::new(5.0, 0.0, 0.0)).norm() <= 0.25);
    }

    #[test]
    fn empty_map_empty_cloud() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = VoxelGrid::new(Vec3::new(-5.0, -5.0, -5.0), 0.5, [20, 20, 20]).unwrap();
        assert!(synth_lidar(&Pose::default(), &m, &BeamPattern::default(), 0.1, &mut rng).is_empty());
    }

    #[test]
    fn noiseless_points_lie_on_occupied_surface() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut m = wall_map();
        m.fill_box(Vec3::new(-4.0, 2.0, -2.0), Vec3::new(-1.0, 3.0, 1.0), true);
        let pose = Pose::new(0.3, -0.2, 0.1, 0.05, -0.1, 0.7);
        let cloud = synth_lidar(&pose, &m, &BeamPattern::default(), 0.0, &mut rng);
        assert!(!cloud.is_empty());
        let r = m.resolution();
        for p in &cloud {
            let w = pose.body_to_map(p);
            let near = m
                .occupied_cells()
                .any(|c| (0..3).all(|k| (m.geometry().cell_center(c)[k] - w[k]).abs() <= 0.5 * r + 1e-9));
            assert!(near, "{w:?}");
        }
    }

    #[test]
    fn range_noise_std() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = wall_map();
        let sigma = 0.05;
        let n = 10_000;
        let rs: Vec<f64> = (0..n)
            .map(|_| synth_lidar(&Pose::default(), &m, &BeamPattern::single(20.0), sigma, &mut rng)[0].x)
            .collect();
        let mean = rs.iter().sum::<f64>() / n as f64;
        let var = rs.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var.sqrt() - sigma).abs() / sigma < 0.05, "std {}", var.sqrt());
        assert!((mean - 5.0).abs() < 0.01);
    }

    #[test]
    fn gps_denied_indoors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = [Aabb::new(Vec3::new(0.0, 0.0, 0.0), Vec3::new(10.0, 10.0, 6.0))];
        assert!(synth_gps(&Vec3::new(5.0, 5.0, 1.0), &b, 1.0, &mut rng).is_none());
        let p = Vec3::new(-1.0, 5.0, 1.0);
        assert!(synth_gps(&p, &b, 1.0, &mut rng).is_some());
        assert_eq!(synth_gps(&p, &b, 0.0, &mut rng), Some(p));
    }

    #[test]
    fn zero_noise_equals_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = Pose::new(1.0, 2.0, 3.0, 0.01, 0.02, 0.5);
        let b = Pose::new(1.5, 2.2, 3.1, 0.0, 0.0, 0.6);
        assert_eq!(synth_imu(&a, &ImuNoise::default(), &mut rng), (0.01, 0.02, 0.5));
        assert_eq!(synth_altimeter(&a.position(), 0.0, 0.0, &mut rng), 3.0);
        let d = synth_odometry(&a, &b, &OdomNoise::default(), &mut rng);
        assert_eq!(d, true_delta(&a, &b));
        let est = Estimate { x: a.x, y: a.y, z: a.z, yaw: a.yaw, covariance: Matrix4::zeros() };
        let back = est.advanced(&d);
        assert!((back.position() - b.position()).norm() < 1e-12);
        assert!((back.yaw - b.yaw).abs() < 1e-12);
    }

    #[test]
    fn drift_integrates_linearly() {
        // 100 m in 0.1 m steps with 1% scale drift: dead reckoning ends
        // drift * distance = 1 m ahead, plus noise of std k * 0.1 * sqrt(1000).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let noise = OdomNoise { proportional: 0.01, drift: 0.01 };
        let mut dead = 0.0;
        for i in 0..1000 {
            let a = Pose::planar(i as f64 * 0.1, 0.0, 0.0, 0.0);
            let b = Pose::planar((i + 1) as f64 * 0.1, 0.0, 0.0, 0.0);
            dead += synth_odometry(&a, &b, &noise, &mut rng).dx;
        }
        let err = dead - 100.0;
        let tol = 4.0 * 0.01 * 0.1 * 1000f64.sqrt();
        assert!((err - 1.0).abs() < tol, "error {err}");
    }
}
