//! Localizes a fire on a pillar from two thermal views 90 degrees apart,
//! each paired with a noisy LIDAR sweep along the hot-spot bearing.

use embr::fire::{associate_range, if_update, pixel_to_ray, segment_fire, FireBelief, FireConfig, FireMeasurement};
use embr::sim::{synth_thermal, FireSpot, ThermalCamera};
use embr::world_model::{raycast, VoxelGrid};
use embr::{Pose, Vec3};
use nalgebra::Matrix3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut map = VoxelGrid::new(Vec3::new(-2.0, -2.0, -1.0), 0.05, [300, 300, 80])?;
    map.fill_box(Vec3::new(9.75, 9.75, -1.0), Vec3::new(10.25, 10.25, 2.5), true);
    let fire = Vec3::new(9.76, 9.76, 1.0);
    let cfg = FireConfig { sigma_lidar: 0.1, r0: 10.0, ..FireConfig::default() };
    let cam = ThermalCamera { width: 320, height: 240, hfov: 40f64.to_radians() };
    let noise = Normal::new(0.0, 0.1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let mut belief = FireBelief::new();
    for (eye, yaw) in [(fire - Vec3::new(10.0, 0.0, 0.0), 0.0), (fire - Vec3::new(0.0, 10.0, 0.0), std::f64::consts::FRAC_PI_2)] {
        let pose = Pose::new(eye.x, eye.y, eye.z, 0.0, 0.0, yaw);
        let spot = FireSpot { position: fire, temperature: 300.0, radius: 0.2 };
        let img = synth_thermal(&pose, &pose, &cam, &[spot], &map, 0.3);
        let det = segment_fire(&img, cfg.threshold, cfg.min_pixels).into_iter().next().ok_or("fire not seen")?;
        let ray = pixel_to_ray(det.u, det.v, &img.intrinsics, &img.pose);
        let mut cloud = Vec::new();
        for i in -10..=10 {
            for j in -10..=10 {
                let offs = Vec3::new(0.0, i as f64 * 0.1f64.to_radians(), j as f64 * 0.1f64.to_radians());
                let dir = (ray.direction + pose.rotation() * offs).normalize();
                if let Ok(Some(r)) = raycast(&eye, &dir, 30.0, &map) {
                    cloud.push(eye + dir * (r + noise.sample(&mut rng)));
                }
            }
        }
        let assoc = associate_range(&ray, &cloud, &map, &cfg);
        let m = FireMeasurement::new(&ray, &assoc, cfg.sigma_bearing, &Matrix3::zeros());
        belief = if_update(&belief, &m)?;
        let est = belief.estimate().ok_or("singular belief")?;
        println!(
            "view yaw {:5.1} deg: range {:.3} m ({:?}), estimate {:.3} {:.3} {:.3}, error {:.3} m, cov trace {:.5}",
            yaw.to_degrees(),
            assoc.range,
            assoc.source,
            est.x,
            est.y,
            est.z,
            (est - fire).norm(),
            belief.covariance().map_or(f64::NAN, |c| c.trace())
        );
    }
    Ok(())
}
