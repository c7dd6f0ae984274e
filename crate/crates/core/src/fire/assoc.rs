use super::{FireConfig, Ray};
use crate::geometry::Vec3;
use crate::world_model::{raycast, VoxelGrid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RangeSource {
    Lidar,
    MapFallback,
}

impl RangeSource {
    pub fn name(self) -> &'static str {
        match self {
            RangeSource::Lidar => "LIDAR",
            RangeSource::MapFallback => "MAP_FALLBACK",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeAssociation {
    pub range: f64,
    pub source: RangeSource,
    /// Range variance, m^2.
    pub variance: f64,
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Range along a fire ray. Map-frame LIDAR points inside the angular window
/// give the median along-ray distance; otherwise the map is raycast and a
/// much larger variance is reported.
pub fn associate_range(ray: &Ray, cloud: &[Vec3], map: &VoxelGrid, cfg: &FireConfig) -> RangeAssociation {
    let cos_w = cfg.angular_window.cos();
    let mut along: Vec<f64> = cloud
        .iter()
        .filter_map(|p| {
            let v = p - ray.origin;
            let n = v.norm();
            let t = v.dot(&ray.direction);
            (n > 0.0 && t > 0.0 && t >= cos_w * n).then_some(t)
        })
        .collect();
    let lidar_var = |r: f64| (cfg.sigma_lidar * r / cfg.r0).powi(2);
    if !along.is_empty() {
        let range = median(&mut along);
        return RangeAssociation { range, source: RangeSource::Lidar, variance: lidar_var(range) };
    }
    let range = raycast(&ray.origin, &ray.direction, cfg.max_range, map)
        .ok()
        .flatten()
        .unwrap_or(cfg.max_range);
    let variance = cfg
        .sigma_fallback
        .powi(2)
        .max(100.0 * cfg.sigma_lidar.powi(2))
        .max(100.0 * lidar_var(range));
    RangeAssociation { range, source: RangeSource::MapFallback, variance }
}
