use super::ops::{
    effective_sample_size, estimate, fuse_weights, initialize, normalize_weights, predict,
    resample, should_update, weight_gps, weight_map, Estimate, LevelCloud,
};
use super::{MclConfig, MclError, OdomDelta, ParticleSet, SensorFrame, Weighting};
use crate::geometry::Pose;
use crate::world_model::LikelihoodGrid;
use rand::Rng;
use rayon::prelude::*;
use std::sync::Arc;

pub const TRACE_HEADER: &str = "tick,est_x,est_y,est_z,est_yaw,cov_trace,n_eff,used_gps,used_cloud";

/// One line of the filter trace log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub tick: u64,
    pub estimate: Estimate,
    pub n_eff: f64,
    pub used_gps: bool,
    pub used_cloud: bool,
}

impl TraceRow {
    pub fn to_csv(&self) -> String {
        let e = &self.estimate;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.tick,
            e.x,
            e.y,
            e.z,
            e.yaw,
            e.covariance.trace(),
            self.n_eff,
            self.used_gps as u8,
            self.used_cloud as u8
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CycleOutcome {
    pub updated: bool,
    pub used_gps: bool,
    pub used_cloud: bool,
    pub resampled: bool,
    pub recovered: bool,
    pub n_eff: f64,
}

/// Threshold-gated particle filter for one robot.
pub struct Mcl {
    cfg: MclConfig,
    grid: Arc<LikelihoodGrid>,
    set: ParticleSet,
    pending: OdomDelta,
    last: Estimate,
    spreads: [f64; 4],
    n_eff: f64,
}

impl Mcl {
    pub fn new<R: Rng + ?Sized>(
        cfg: MclConfig,
        grid: Arc<LikelihoodGrid>,
        initial: &Pose,
        spreads: [f64; 4],
        rng: &mut R,
    ) -> Result<Self, MclError> {
        cfg.validate()?;
        let set = initialize(initial, spreads, &cfg, rng)?;
        let last = estimate(&set);
        let n_eff = effective_sample_size(&set);
        Ok(Self { cfg, grid, set, pending: OdomDelta::default(), last, spreads, n_eff })
    }

    pub fn config(&self) -> &MclConfig {
        &self.cfg
    }

    pub fn particles(&self) -> &ParticleSet {
        &self.set
    }

    /// Estimate of the last update cycle advanced by odometry received since.
    pub fn estimate(&self) -> Estimate {
        self.last.advanced(&self.pending)
    }

    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }

    /// Whether feeding `odom` next would trigger an update cycle. Lets the
    /// caller skip synthesizing or reading sensors that would be ignored.
    pub fn will_update(&self, odom: &OdomDelta) -> bool {
        should_update(&self.pending.compose(odom), &self.cfg)
    }

    /// Feeds one tick of odometry and sensors. Runs an update cycle when the
    /// accumulated motion crosses a threshold.
    pub fn process<R: Rng + ?Sized>(
        &mut self,
        odom: &OdomDelta,
        frame: &SensorFrame,
        rng: &mut R,
    ) -> Result<CycleOutcome, MclError> {
        if !odom.is_finite() {
            return Err(MclError::InvalidConfig("non-finite odometry".into()));
        }
        self.pending = self.pending.compose(odom);
        if !should_update(&self.pending, &self.cfg) {
            return Ok(CycleOutcome { n_eff: self.n_eff, ..Default::default() });
        }
        let delta = std::mem::take(&mut self.pending);
        predict(&mut self.set, &delta, &self.cfg, rng);
        let mut out = CycleOutcome { updated: true, ..Default::default() };

        let use_map = self.cfg.weighting != Weighting::GpsOnly && !frame.cloud.is_empty();
        let gps = frame.gps.filter(|_| self.cfg.weighting != Weighting::MapOnly);

        let map_w = if use_map {
            let cloud = LevelCloud::subsampled(
                &frame.cloud,
                frame.imu_roll,
                frame.imu_pitch,
                self.cfg.max_cloud_points,
            );
            let grid = &*self.grid;
            Some(
                self.set
                    .particles
                    .par_iter()
                    .map(|p| weight_map(p, &cloud, grid))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        } else {
            None
        };
        let gps_w = gps.map(|g| {
            self.set
                .particles
                .iter()
                .map(|p| weight_gps(p, &g, self.cfg.sigma_gps))
                .collect::<Vec<_>>()
        });

        let alpha = self.cfg.alpha;
        out.used_cloud = map_w.is_some() && (alpha > 0.0 || gps_w.is_none());
        out.used_gps = gps_w.is_some() && (alpha < 1.0 || map_w.is_none());

        match fuse_weights(map_w.as_deref(), gps_w.as_deref(), alpha) {
            Ok(mut raw) => {
                for (r, p) in raw.iter_mut().zip(&self.set.particles) {
                    *r *= p.weight;
                }
                match normalize_weights(&mut self.set, &raw) {
                    Ok(()) => {}
                    Err(MclError::Divergence) => {
                        self.recover(rng)?;
                        out.recovered = true;
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(MclError::NoWeightSource) => {}
            Err(e) => return Err(e),
        }

        self.n_eff = effective_sample_size(&self.set);
        if !out.recovered && self.n_eff < self.set.len() as f64 / 2.0 {
            resample(&mut self.set, frame.altimeter, Some(frame.imu_yaw), &self.cfg, rng)?;
            out.resampled = true;
        }
        out.n_eff = self.n_eff;
        self.last = estimate(&self.set);
        Ok(out)
    }

    fn recover<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<(), MclError> {
        let k = self.cfg.recovery_spread_factor;
        let spreads = self.spreads.map(|s| s * k);
        let pose = self.last.pose(0.0, 0.0);
        log::warn!("particle weights collapsed, reinitializing around {pose:?}");
        self.set = initialize(&pose, spreads, &self.cfg, rng)?;
        Ok(())
    }

    pub fn trace_row(&self, tick: u64, out: &CycleOutcome) -> TraceRow {
        TraceRow {
            tick,
            estimate: self.estimate(),
            n_eff: self.n_eff,
            used_gps: out.used_gps,
            used_cloud: out.used_cloud,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec3;
    use crate::world_model::{build_likelihood_grid, VoxelGrid};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn corridor() -> Arc<LikelihoodGrid> {
        let mut m = VoxelGrid::new(Vec3::zeros(), 0.25, [40, 40, 8]).unwrap();
        m.fill_box(Vec3::new(0.0, 0.0, 0.0), Vec3::new(10.0, 0.25, 2.0), true);
        m.fill_box(Vec3::new(0.0, 0.0, 0.0), Vec3::new(0.25, 10.0, 2.0), true);
        Arc::new(build_likelihood_grid(&m, 0.2, 0.6).unwrap())
    }

    #[test]
    fn below_threshold_no_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let cfg = MclConfig { n_particles: 50, ..MclConfig::uav() };
        let mut f = Mcl::new(cfg, corridor(), &Pose::planar(3.0, 3.0, 1.0, 0.0), [0.1, 0.1, 0.1, 0.0], &mut rng).unwrap();
        let o = f.process(&OdomDelta::new(0.01, 0.0, 0.0, 0.0), &SensorFrame::default(), &mut rng).unwrap();
        assert!(!o.updated);
        assert!((f.estimate().x - f.last.x - 0.01).abs() < 1e-12);
    }

    #[test]
    fn weights_normalized_after_cycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = MclConfig { n_particles: 200, ..MclConfig::uav() };
        let mut f = Mcl::new(cfg, corridor(), &Pose::planar(3.0, 3.0, 1.0, 0.0), [0.3, 0.3, 0.0, 0.05], &mut rng).unwrap();
        let frame = SensorFrame {
            cloud: vec![Vec3::new(-2.9, 0.0, 0.0), Vec3::new(0.0, -2.9, 0.0), Vec3::new(1.0, -2.9, 0.0)],
            gps: Some(Vec3::new(3.3, 3.0, 9.0)),
            ..Default::default()
        };
        for _ in 0..5 {
            let o = f.process(&OdomDelta::new(0.2, 0.0, 0.0, 0.0), &frame, &mut rng).unwrap();
            assert!(o.updated && o.used_gps && o.used_cloud);
            assert!((f.particles().weight_sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn collapse_triggers_recovery() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = MclConfig { n_particles: 20, weighting: Weighting::MapOnly, ..MclConfig::uav() };
        let mut f = Mcl::new(cfg, corridor(), &Pose::planar(5.0, 5.0, 1.0, 0.0), [0.0; 4], &mut rng).unwrap();
        let frame = SensorFrame { cloud: vec![Vec3::new(100.0, 0.0, 0.0)], ..Default::default() };
        let o = f.process(&OdomDelta::new(0.5, 0.0, 0.0, 0.0), &frame, &mut rng).unwrap();
        assert!(o.recovered);
        assert!((f.particles().weight_sum() - 1.0).abs() < 1e-9);
        let spread = f.particles().particles.iter().map(|p| p.x).fold(f64::NAN, f64::max);
        assert!(spread.is_finite());
    }
}
