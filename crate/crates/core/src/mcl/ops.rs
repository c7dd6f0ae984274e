use super::{MclConfig, MclError, OdomDelta, Particle, ParticleSet, Platform};
use crate::geometry::{normalize_angle, rotation_tilt, Pose, Vec3};
use crate::world_model::LikelihoodGrid;
use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use std::f64::consts::PI;

pub fn should_update(accumulated: &OdomDelta, cfg: &MclConfig) -> bool {
    accumulated.translation_norm() >= cfg.trans_threshold
        || normalize_angle(accumulated.dyaw).abs() >= cfg.rot_threshold
}

#[inline]
fn noisy<R: Rng + ?Sized>(mean: f64, k: f64, rng: &mut R) -> f64 {
    let sd = k * mean.abs();
    if sd > 0.0 {
        Normal::new(mean, sd).map(|n| n.sample(rng)).unwrap_or(mean)
    } else {
        mean
    }
}

/// Propagates every particle by a noisy copy of the body-frame increment,
/// rotated by the particle's own yaw. Weights are untouched.
pub fn predict<R: Rng + ?Sized>(set: &mut ParticleSet, d: &OdomDelta, cfg: &MclConfig, rng: &mut R) {
    let k_z = cfg.effective_k_z();
    for p in &mut set.particles {
        let dx = noisy(d.dx, cfg.k_x, rng);
        let dy = noisy(d.dy, cfg.k_y, rng);
        let dz = noisy(d.dz, k_z, rng);
        let dyaw = noisy(d.dyaw, cfg.k_yaw, rng);
        let (s, c) = p.yaw.sin_cos();
        p.x += dx * c - dy * s;
        p.y += dx * s + dy * c;
        p.z += dz;
        p.yaw = normalize_angle(p.yaw + dyaw);
    }
}

/// Cloud already rotated by IMU roll and pitch, shared by all particles of
/// one update.
#[derive(Debug, Clone)]
pub struct LevelCloud {
    points: Vec<Vec3>,
}

impl LevelCloud {
    pub fn new(cloud: &[Vec3], roll: f64, pitch: f64) -> Self {
        let r = rotation_tilt(roll, pitch);
        Self { points: cloud.iter().map(|c| r * c).collect() }
    }

    /// Same as `new` but keeps at most `max_points`, chosen with a uniform
    /// stride.
    pub fn subsampled(cloud: &[Vec3], roll: f64, pitch: f64, max_points: usize) -> Self {
        if cloud.len() <= max_points {
            return Self::new(cloud, roll, pitch);
        }
        let r = rotation_tilt(roll, pitch);
        let n = cloud.len();
        let points = (0..max_points).map(|i| r * cloud[i * n / max_points]).collect();
        Self { points }
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Mean likelihood-grid value of the leveled cloud placed at the particle's
/// yaw and position. Points outside the grid contribute zero.
pub fn weight_map(p: &Particle, cloud: &LevelCloud, grid: &LikelihoodGrid) -> Result<f64, MclError> {
    if cloud.is_empty() {
        return Err(MclError::EmptyCloud);
    }
    let (s, c) = p.yaw.sin_cos();
    let sum: f64 = cloud
        .points
        .iter()
        .map(|q| {
            let w = Vec3::new(p.x + c * q.x - s * q.y, p.y + s * q.x + c * q.y, p.z + q.z);
            grid.value_at(&w)
        })
        .sum();
    Ok(sum / cloud.len() as f64)
}

/// Gaussian of the horizontal distance to the fix; altitude is ignored.
pub fn weight_gps(p: &Particle, gps: &Vec3, sigma_gps: f64) -> f64 {
    let dx = p.x - gps.x;
    let dy = p.y - gps.y;
    let var = sigma_gps * sigma_gps;
    (-(dx * dx + dy * dy) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

/// `alpha * map + (1 - alpha) * gps`; an absent source is dropped and the
/// other one used alone.
pub fn fuse_weights(
    map_w: Option<&[f64]>,
    gps_w: Option<&[f64]>,
    alpha: f64,
) -> Result<Vec<f64>, MclError> {
    match (map_w, gps_w) {
        (Some(m), Some(g)) => {
            if m.len() != g.len() {
                return Err(MclError::LengthMismatch { got: g.len(), expected: m.len() });
            }
            Ok(m.iter().zip(g).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect())
        }
        (Some(m), None) => Ok(m.to_vec()),
        (None, Some(g)) => Ok(g.to_vec()),
        (None, None) => Err(MclError::NoWeightSource),
    }
}

/// Writes `raw / sum(raw)` into the set.
pub fn normalize_weights(set: &mut ParticleSet, raw: &[f64]) -> Result<(), MclError> {
    if raw.len() != set.len() {
        return Err(MclError::LengthMismatch { got: raw.len(), expected: set.len() });
    }
    let sum: f64 = raw.iter().sum();
    if !(sum > 0.0) || !sum.is_finite() {
        return Err(MclError::Divergence);
    }
    for (p, w) in set.particles.iter_mut().zip(raw) {
        p.weight = w / sum;
    }
    Ok(())
}

pub fn fuse_and_normalize(
    set: &mut ParticleSet,
    map_w: Option<&[f64]>,
    gps_w: Option<&[f64]>,
    alpha: f64,
) -> Result<(), MclError> {
    let raw = fuse_weights(map_w, gps_w, alpha)?;
    normalize_weights(set, &raw)
}

/// `1 / sum(w^2)`.
pub fn effective_sample_size(set: &ParticleSet) -> f64 {
    let s: f64 = set.particles.iter().map(|p| p.weight * p.weight).sum();
    if s > 0.0 {
        1.0 / s
    } else {
        0.0
    }
}

/// Low-variance systematic resampling followed by the altitude and yaw
/// constraints (aerial platforms only). Output weights are uniform.
pub fn resample<R: Rng + ?Sized>(
    set: &mut ParticleSet,
    altimeter: Option<f64>,
    imu_yaw: Option<f64>,
    cfg: &MclConfig,
    rng: &mut R,
) -> Result<(), MclError> {
    let n = set.len();
    let total = set.weight_sum();
    if n == 0 || !(total > 0.0) || !total.is_finite() {
        return Err(MclError::DegenerateWeights(total));
    }
    let step = total / n as f64;
    let r = rng.random::<f64>() * step;
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    let mut c = set.particles[0].weight;
    for m in 0..n {
        let u = r + m as f64 * step;
        while u > c && i + 1 < n {
            i += 1;
            c += set.particles[i].weight;
        }
        out.push(set.particles[i]);
    }
    let uniform = 1.0 / n as f64;
    for p in &mut out {
        p.weight = uniform;
    }
    if cfg.platform == Platform::Uav {
        if let Some(h) = altimeter {
            redraw(&mut out, h, cfg.z_resample_sigma, rng, |p, v| p.z = v);
        }
        if let Some(yaw) = imu_yaw {
            redraw(&mut out, yaw, cfg.yaw_resample_sigma, rng, |p, v| p.yaw = normalize_angle(v));
        }
    }
    set.particles = out;
    Ok(())
}

fn redraw<R: Rng + ?Sized>(
    ps: &mut [Particle],
    mean: f64,
    sd: f64,
    rng: &mut R,
    mut apply: impl FnMut(&mut Particle, f64),
) {
    match Normal::new(mean, sd) {
        Ok(dist) if sd > 0.0 => ps.iter_mut().for_each(|p| apply(p, dist.sample(rng))),
        _ => ps.iter_mut().for_each(|p| apply(p, mean)),
    }
}

/// Weighted pose estimate with its `[x, y, z, yaw]` covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    pub covariance: Matrix4<f64>,
}

impl Estimate {
    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn pose(&self, roll: f64, pitch: f64) -> Pose {
        Pose::new(self.x, self.y, self.z, roll, pitch, self.yaw)
    }

    /// Applies a body-frame increment at the estimated yaw.
    pub fn advanced(&self, d: &OdomDelta) -> Estimate {
        let (s, c) = self.yaw.sin_cos();
        Estimate {
            x: self.x + d.dx * c - d.dy * s,
            y: self.y + d.dx * s + d.dy * c,
            z: self.z + d.dz,
            yaw: normalize_angle(self.yaw + d.dyaw),
            covariance: self.covariance,
        }
    }
}

/// Weighted mean of position, circular weighted mean of yaw and the
/// weighted sample covariance (yaw residuals wrapped).
pub fn estimate(set: &ParticleSet) -> Estimate {
    let total = set.weight_sum();
    let norm = if total > 0.0 { total } else { 1.0 };
    let (mut x, mut y, mut z, mut sn, mut cs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for p in &set.particles {
        let w = p.weight / norm;
        x += w * p.x;
        y += w * p.y;
        z += w * p.z;
        sn += w * p.yaw.sin();
        cs += w * p.yaw.cos();
    }
    let yaw = if sn == 0.0 && cs == 0.0 { 0.0 } else { sn.atan2(cs) };
    let mut cov = Matrix4::zeros();
    for p in &set.particles {
        let w = p.weight / norm;
        let r = Vector4::new(p.x - x, p.y - y, p.z - z, normalize_angle(p.yaw - yaw));
        cov += (r * r.transpose()) * w;
    }
    Estimate { x, y, z, yaw: normalize_angle(yaw), covariance: cov }
}

/// `n_particles` Gaussian samples around `pose` with per-axis spreads
/// `[x, y, z, yaw]` and uniform weights.
pub fn initialize<R: Rng + ?Sized>(
    pose: &Pose,
    spreads: [f64; 4],
    cfg: &MclConfig,
    rng: &mut R,
) -> Result<ParticleSet, MclError> {
    cfg.validate()?;
    if spreads.iter().any(|s| !(*s >= 0.0)) {
        return Err(MclError::InvalidConfig("spreads must be non-negative".into()));
    }
    let n = cfg.n_particles;
    let w = 1.0 / n as f64;
    let mean = [pose.x, pose.y, pose.z, pose.yaw];
    let draw = |k: usize, rng: &mut R| {
        if spreads[k] > 0.0 {
            Normal::new(mean[k], spreads[k]).unwrap().sample(rng)
        } else {
            mean[k]
        }
    };
    let particles = (0..n)
        .map(|_| {
            let x = draw(0, rng);
            let y = draw(1, rng);
            let z = draw(2, rng);
            let yaw = draw(3, rng);
            Particle::new(x, y, z, yaw, w)
        })
        .collect();
    Ok(ParticleSet::new(particles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::{build_likelihood_grid, VoxelGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn quiet() -> MclConfig {
        MclConfig { k_x: 0.0, k_y: 0.0, k_z: 0.0, k_yaw: 0.0, ..MclConfig::uav() }
    }

    fn set_of(poses: &[(f64, f64, f64, f64)]) -> ParticleSet {
        let w = 1.0 / poses.len() as f64;
        ParticleSet::new(poses.iter().map(|&(x, y, z, yaw)| Particle::new(x, y, z, yaw, w)).collect())
    }

    #[test]
    fn update_gate() {
        let cfg = MclConfig::uav();
        assert!(!should_update(&OdomDelta::default(), &cfg));
        assert!(should_update(&OdomDelta::new(cfg.trans_threshold, 0.0, 0.0, 0.0), &cfg));
        assert!(should_update(&OdomDelta::new(0.0, 0.0, 0.0, cfg.rot_threshold), &cfg));
        assert!(should_update(&OdomDelta::new(0.0, 0.0, 0.0, -cfg.rot_threshold), &cfg));
        assert!(!should_update(&OdomDelta::new(0.05, 0.05, 0.0, 0.01), &cfg));
    }

    #[test]
    fn predict_noise_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = quiet();
        let s0 = set_of(&[(0.0, 0.0, 0.0, 0.0), (1.0, 2.0, 3.0, 0.0), (-1.0, 0.5, 0.0, 0.0)]);
        let mut s = s0.clone();
        predict(&mut s, &OdomDelta::default(), &cfg, &mut rng);
        assert_eq!(s, s0);

        predict(&mut s, &OdomDelta::new(1.0, 0.0, 0.0, 0.0), &cfg, &mut rng);
        for (a, b) in s.particles.iter().zip(&s0.particles) {
            assert_eq!(a.x, b.x + 1.0);
            assert_eq!(a.y, b.y);
        }

        let mut r = set_of(&[(2.0, 3.0, 0.0, FRAC_PI_2)]);
        predict(&mut r, &OdomDelta::new(1.0, 0.0, 0.0, 0.0), &cfg, &mut rng);
        // direct rotation matrix evaluation: [cos -sin; sin cos] * [1, 0]
        let expect = (2.0 + FRAC_PI_2.cos(), 3.0 + FRAC_PI_2.sin());
        assert!((r.particles[0].x - expect.0).abs() < 1e-12);
        assert!((r.particles[0].x - 2.0).abs() < 1e-12);
        assert!((r.particles[0].y - 4.0).abs() < 1e-12);
        assert!((r.particles[0].y - expect.1).abs() < 1e-12);
    }

    #[test]
    fn ugv_never_disperses_z() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = MclConfig { k_z: 0.5, ..MclConfig::ugv() };
        let mut s = set_of(&[(0.0, 0.0, 0.4, 0.0); 50]);
        for _ in 0..100 {
            predict(&mut s, &OdomDelta::new(0.3, 0.1, 0.2, 0.05), &cfg, &mut rng);
        }
        let mean = s.particles.iter().map(|p| p.z).sum::<f64>() / 50.0;
        let var = s.particles.iter().map(|p| (p.z - mean).powi(2)).sum::<f64>() / 50.0;
        assert!(var < 1e-4);
    }

    fn single_voxel_grid() -> LikelihoodGrid {
        let mut m = VoxelGrid::new(Vec3::zeros(), 1.0, [5, 5, 5]).unwrap();
        m.set([2, 2, 2], true);
        build_likelihood_grid(&m, 0.5, 1.5).unwrap()
    }

    #[test]
    fn weight_map_peak_and_outside() {
        let grid = single_voxel_grid();
        let p = Particle::new(2.5, 2.5, 2.5, 0.0, 1.0);
        let hit = LevelCloud::new(&[Vec3::zeros()], 0.0, 0.0);
        assert!((weight_map(&p, &hit, &grid).unwrap() - 0.797_884_560_802_865_4).abs() < 1e-12);
        let out = LevelCloud::new(&[Vec3::new(10.0, 0.0, 0.0), Vec3::new(-9.0, 1.0, 0.0)], 0.0, 0.0);
        assert_eq!(weight_map(&p, &out, &grid).unwrap(), 0.0);
        let empty = LevelCloud::new(&[], 0.0, 0.0);
        assert_eq!(weight_map(&p, &empty, &grid), Err(MclError::EmptyCloud));
    }

    #[test]
    fn weight_map_toy_case_by_hand() {
        let grid = single_voxel_grid();
        let peak = grid.peak();
        let one = peak * (-0.5f64 * 4.0).exp(); // d = 1 m, sigma = 0.5
        let root2 = peak * (-(2.0f64) / 0.5).exp(); // d = sqrt 2
        let cloud = [
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(30.0, 0.0, 0.0),
        ];
        let lc = LevelCloud::new(&cloud, 0.0, 0.0);
        // particle A at (1.5, 2.5, 2.5), yaw 0: points land in cells
        // (2,2,2) peak, (1,3,2) sqrt2, (1,2,1) sqrt2, (2,3,2) one, outside 0
        let a = Particle::new(1.5, 2.5, 2.5, 0.0, 1.0);
        let expect_a = (peak + root2 + root2 + one + 0.0) / 5.0;
        // particle B at (2.5, 1.5, 2.5), yaw pi/2: (x,y)->(-y,x):
        // (2,2,2) peak... first point -> (2.5, 2.5) peak; second -> (1.5,1.5) cell (1,1,2) sqrt2;
        // third -> (2.5,1.5,1.5) cell (2,1,1) sqrt2; fourth -> (1.5,2.5) cell (1,2,2) one
        let b = Particle::new(2.5, 1.5, 2.5, FRAC_PI_2, 1.0);
        let expect_b = (peak + root2 + root2 + one) / 5.0;
        // particle C far away
        let c = Particle::new(0.5, 0.5, 0.5, 0.0, 1.0);
        let got: Vec<f64> = [a, b, c].iter().map(|p| weight_map(p, &lc, &grid).unwrap()).collect();
        assert!((got[0] - expect_a).abs() < 1e-14);
        assert!((got[1] - expect_b).abs() < 1e-14);
        // C: points at (1.5,.5,.5) d=sqrt(1+4+4)=3 > 1.5 trunc ... all zero
        assert_eq!(got[2], 0.0);
    }

    #[test]
    fn roll_pitch_applied_before_yaw() {
        let grid = single_voxel_grid();
        // a point below the body, pitched by -pi/2, ends up in front
        let lc = LevelCloud::new(&[Vec3::new(0.0, 0.0, -1.0)], 0.0, -FRAC_PI_2);
        let p = Particle::new(1.5, 2.5, 2.5, 0.0, 1.0);
        assert!((weight_map(&p, &lc, &grid).unwrap() - grid.peak()).abs() < 1e-12);
    }

    #[test]
    fn gps_ignores_altitude() {
        let p = Particle::new(1.0, 2.0, 50.0, 0.0, 1.0);
        let w = weight_gps(&p, &Vec3::new(1.0, 2.0, -3.0), 1.0);
        assert!((w - 0.398_942_280_401_432_7).abs() < 1e-12);
        let w = weight_gps(&p, &Vec3::new(1.0, 3.0, 0.0), 1.0);
        assert!((w - 0.398_942_280_401_432_7 * (-0.5f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fuse_endpoints_and_errors() {
        let f = fuse_weights(Some(&[0.4]), Some(&[0.6]), 0.5).unwrap();
        assert!((f[0] - 0.5).abs() < 1e-15);
        let mut s = set_of(&[(0.0, 0.0, 0.0, 0.0); 3]);
        let map = [0.1, 0.3, 0.6];
        fuse_and_normalize(&mut s, Some(&map), Some(&[5.0, 1.0, 0.0]), 1.0).unwrap();
        let w = s.weights();
        for (a, b) in w.iter().zip(&map) {
            assert!((a - b / 1.0).abs() < 1e-15);
        }
        assert_eq!(
            fuse_and_normalize(&mut s, Some(&[0.0; 3]), None, 0.5),
            Err(MclError::Divergence)
        );
        assert_eq!(fuse_and_normalize(&mut s, None, None, 0.5), Err(MclError::NoWeightSource));
        assert!(matches!(
            fuse_and_normalize(&mut s, Some(&[1.0; 2]), None, 0.5),
            Err(MclError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn resample_concentrates_on_single_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = quiet();
        let mut s = set_of(&[(0.0, 0.0, 0.0, 0.0), (5.0, 5.0, 1.0, 1.0), (9.0, 1.0, 0.0, 0.0)]);
        s.particles.iter_mut().enumerate().for_each(|(i, p)| p.weight = (i == 1) as u8 as f64);
        resample(&mut s, None, None, &cfg, &mut rng).unwrap();
        assert!(s.particles.iter().all(|p| p.x == 5.0 && p.y == 5.0 && p.yaw == 1.0));
        assert!(s.particles.iter().all(|p| p.weight == 1.0 / 3.0));
    }

    #[test]
    fn resample_uniform_preserves_multiset() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let poses: Vec<_> = (0..64).map(|i| (i as f64, 0.0, 0.0, 0.0)).collect();
        let mut s = set_of(&poses);
        resample(&mut s, None, None, &quiet(), &mut rng).unwrap();
        let xs: Vec<f64> = s.particles.iter().map(|p| p.x).collect();
        let expect: Vec<f64> = (0..64).map(|i| i as f64).collect();
        assert_eq!(xs, expect);
    }

    #[test]
    fn resample_rejects_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = set_of(&[(0.0, 0.0, 0.0, 0.0); 4]);
        s.particles.iter_mut().for_each(|p| p.weight = 0.0);
        assert!(matches!(
            resample(&mut s, None, None, &quiet(), &mut rng),
            Err(MclError::DegenerateWeights(_))
        ));
    }

    #[test]
    fn altimeter_constraint_law_of_large_numbers() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = MclConfig { n_particles: 10_000, z_resample_sigma: 0.1, ..quiet() };
        let mut s = initialize(&Pose::planar(0.0, 0.0, 3.0, 0.0), [1.0; 4], &cfg, &mut rng).unwrap();
        resample(&mut s, Some(10.0), Some(0.5), &cfg, &mut rng).unwrap();
        let mz = s.particles.iter().map(|p| p.z).sum::<f64>() / 10_000.0;
        assert!((mz - 10.0).abs() < 0.01, "mean z {mz}");
        let myaw = s.particles.iter().map(|p| p.yaw).sum::<f64>() / 10_000.0;
        assert!((myaw - 0.5).abs() < 0.01);

        // ground platform ignores both constraints
        let ugv = MclConfig { platform: Platform::Ugv, ..cfg.clone() };
        let mut g = initialize(&Pose::planar(0.0, 0.0, 3.0, 0.0), [0.0; 4], &ugv, &mut rng).unwrap();
        resample(&mut g, Some(10.0), Some(0.5), &ugv, &mut rng).unwrap();
        assert!(g.particles.iter().all(|p| p.z == 3.0 && p.yaw == 0.0));
    }

    #[test]
    fn estimate_cases() {
        let s = set_of(&[(1.0, 2.0, 3.0, 0.5); 4]);
        let e = estimate(&s);
        assert_eq!((e.x, e.y, e.z), (1.0, 2.0, 3.0));
        assert!((e.yaw - 0.5).abs() < 1e-15);
        assert!(e.covariance.abs().max() < 1e-24);

        let e = estimate(&set_of(&[(1.0, -2.0, 0.5, 0.0), (-1.0, 2.0, -0.5, 0.0)]));
        assert!(e.position().norm() < 1e-15);

        let e = estimate(&set_of(&[(0.0, 0.0, 0.0, 3.1), (0.0, 0.0, 0.0, -3.1)]));
        // unit-vector average: (cos 3.1, sin 3.1) + (cos -3.1, sin -3.1) points at pi
        let oracle = ((3.1f64).sin() + (-3.1f64).sin()).atan2((3.1f64).cos() + (-3.1f64).cos());
        assert!((e.yaw.abs() - PI).abs() < 1e-9);
        assert!((e.yaw.abs() - oracle.abs()).abs() < 1e-9);
        // yaw variance is computed on wrapped residuals
        assert!((e.covariance[(3, 3)] - (PI - 3.1f64).powi(2)).abs() < 1e-9);
    }

    #[test]
    fn initialize_spreads() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = MclConfig { n_particles: 100, ..MclConfig::uav() };
        let pose = Pose::planar(1.0, 2.0, 3.0, 0.3);
        let s = initialize(&pose, [0.0; 4], &cfg, &mut rng).unwrap();
        assert!(s.particles.iter().all(|p| p.x == 1.0 && p.y == 2.0 && p.z == 3.0 && p.yaw == 0.3));
        assert!(s.particles.iter().all(|p| p.weight == 0.01));

        let cfg = MclConfig { n_particles: 100_000, ..MclConfig::uav() };
        let spreads = [0.5, 1.0, 0.2, 0.1];
        let s = initialize(&pose, spreads, &cfg, &mut rng).unwrap();
        let n = s.len() as f64;
        let get = |k: usize, p: &Particle| [p.x, p.y, p.z, p.yaw][k];
        for k in 0..4 {
            let mean = s.particles.iter().map(|p| get(k, p)).sum::<f64>() / n;
            let sd = (s.particles.iter().map(|p| (get(k, p) - mean).powi(2)).sum::<f64>() / n).sqrt();
            assert!((sd / spreads[k] - 1.0).abs() < 0.05, "axis {k}: {sd}");
        }
    }

    #[test]
    fn odom_inverse_composes_to_identity() {
        let d = OdomDelta::new(0.7, -0.2, 0.1, 0.4);
        let id = d.compose(&d.inverse());
        assert!(id.translation_norm() < 1e-15 && id.dyaw.abs() < 1e-15);
    }
}
