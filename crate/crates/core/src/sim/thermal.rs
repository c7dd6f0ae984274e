use crate::fire::{project, Intrinsics, ThermalImage, SENSOR_MAX_C, SENSOR_MIN_C};
use crate::geometry::{Pose, Vec3};
use crate::world_model::{raycast, VoxelGrid};

pub const AMBIENT_C: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalCamera {
    pub width: usize,
    pub height: usize,
    pub hfov: f64,
}

impl Default for ThermalCamera {
    fn default() -> Self {
        Self { width: 80, height: 60, hfov: 57f64.to_radians() }
    }
}

impl ThermalCamera {
    pub fn intrinsics(&self) -> Intrinsics {
        Intrinsics::from_fov(self.width, self.height, self.hfov)
    }
}

/// Hot spot seen by the thermal camera.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireSpot {
    pub position: Vec3,
    pub temperature: f64,
    /// Physical radius of the emitting disc, m.
    pub radius: f64,
}

/// Clear view from `eye` to `target`, ignoring the last `margin` metres
/// where the fire's own support sits.
pub fn visible(eye: &Vec3, target: &Vec3, map: &VoxelGrid, margin: f64) -> bool {
    let d = target - eye;
    let n = d.norm();
    if n <= margin {
        return true;
    }
    matches!(raycast(eye, &d, n - margin, map), Ok(None))
}

/// Renders the fires seen from the true camera pose. The returned image is
/// tagged with `tag_pose`, the pose the consumer believes the camera has.
/// Each unoccluded fire becomes a disc of radius `focal * radius / depth`
/// whose temperature falls from the fire temperature at the center to the
/// midpoint with ambient at the rim.
pub fn synth_thermal(
    camera_pose: &Pose,
    tag_pose: &Pose,
    cam: &ThermalCamera,
    fires: &[FireSpot],
    map: &VoxelGrid,
    occlusion_margin: f64,
) -> ThermalImage {
    let k = cam.intrinsics();
    let (w, h) = (cam.width, cam.height);
    let mut temps = vec![AMBIENT_C; w * h];
    let eye = camera_pose.position();
    for f in fires {
        let depth = camera_pose.map_to_body(&f.position).x;
        if !(depth > 0.0) {
            continue;
        }
        let Some((u0, v0)) = project(&f.position, &k, camera_pose) else { continue };
        let r = k.focal * f.radius / depth;
        if u0 + r < -0.5 || v0 + r < -0.5 || u0 - r > w as f64 - 0.5 || v0 - r > h as f64 - 0.5 {
            continue;
        }
        if !visible(&eye, &f.position, map, occlusion_margin) {
            continue;
        }
        let peak = f.temperature.clamp(SENSOR_MIN_C, SENSOR_MAX_C);
        let shade = |d2: f64| AMBIENT_C + (peak - AMBIENT_C) * (1.0 - 0.5 * d2 / (r * r));
        let ulo = (u0 - r).ceil().max(0.0) as usize;
        let vlo = (v0 - r).ceil().max(0.0) as usize;
        let uhi = ((u0 + r).floor() as i64).min(w as i64 - 1);
        let vhi = ((v0 + r).floor() as i64).min(h as i64 - 1);
        let mut painted = false;
        for v in vlo as i64..=vhi {
            for u in ulo as i64..=uhi {
                let d2 = (u as f64 - u0).powi(2) + (v as f64 - v0).powi(2);
                if d2 <= r * r {
                    let i = v as usize * w + u as usize;
                    temps[i] = temps[i].max(shade(d2));
                    painted = true;
                }
            }
        }
        // Sub-pixel discs still light the pixel they fall in.
        let (ui, vi) = (u0.round(), v0.round());
        if !painted && ui >= 0.0 && vi >= 0.0 && (ui as usize) < w && (vi as usize) < h {
            let i = vi as usize * w + ui as usize;
            temps[i] = temps[i].max(peak);
        }
    }
    ThermalImage::new(w, h, temps, k, *tag_pose).expect("camera model is valid")
}
