use super::FireError;
use crate::geometry::{Pose, Vec3};

/// Pinhole intrinsics in pixels. Pixel `(i, j)` has its center at
/// `u = i`, `v = j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Intrinsics {
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Intrinsics {
    /// Principal point at the image center for the given field of view.
    pub fn from_fov(width: usize, height: usize, hfov: f64) -> Self {
        let focal = (width as f64 / 2.0) / (hfov / 2.0).tan();
        Self { focal, cx: (width as f64 - 1.0) / 2.0, cy: (height as f64 - 1.0) / 2.0 }
    }
}

/// Calibrated thermal frame, row-major. The camera looks along the body x
/// axis of `pose`; image u grows toward body -y and v toward body -z.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalImage {
    pub width: usize,
    pub height: usize,
    pub temperatures: Vec<f64>,
    pub intrinsics: Intrinsics,
    pub pose: Pose,
}

impl ThermalImage {
    pub fn new(
        width: usize,
        height: usize,
        temperatures: Vec<f64>,
        intrinsics: Intrinsics,
        pose: Pose,
    ) -> Result<Self, FireError> {
        if width == 0 || height == 0 || temperatures.len() != width * height {
            return Err(FireError::InvalidImage(format!(
                "{} samples for a {width}x{height} image",
                temperatures.len()
            )));
        }
        if !(intrinsics.focal > 0.0) {
            return Err(FireError::InvalidImage("focal length must be positive".into()));
        }
        Ok(Self { width, height, temperatures, intrinsics, pose })
    }

    pub fn at(&self, u: usize, v: usize) -> f64 {
        self.temperatures[v * self.width + u]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vec3,
    /// Unit length.
    pub direction: Vec3,
}

impl Ray {
    pub fn point_at(&self, t: f64) -> Vec3 {
        self.origin + self.direction * t
    }
}

/// Back-projects a pixel position into a map-frame ray.
pub fn pixel_to_ray(u: f64, v: f64, k: &Intrinsics, pose: &Pose) -> Ray {
    let ox = (u - k.cx) / k.focal;
    let oy = (v - k.cy) / k.focal;
    let body = Vec3::new(1.0, -ox, -oy);
    Ray { origin: pose.position(), direction: (pose.rotation() * body).normalize() }
}

/// Pixel coordinates of a map point, or `None` behind the camera.
pub fn project(p: &Vec3, k: &Intrinsics, pose: &Pose) -> Option<(f64, f64)> {
    let b = pose.map_to_body(p);
    if b.x <= 0.0 {
        return None;
    }
    Some((k.cx - k.focal * b.y / b.x, k.cy - k.focal * b.z / b.x))
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: Intrinsics = Intrinsics { focal: 100.0, cx: 39.5, cy: 29.5 };

    #[test]
    fn principal_point_looks_forward() {
        let r = pixel_to_ray(K.cx, K.cy, &K, &Pose::default());
        assert_eq!(r.direction, Vec3::new(1.0, 0.0, 0.0));
        let yawed = Pose::planar(1.0, 2.0, 3.0, std::f64::consts::FRAC_PI_2);
        let r = pixel_to_ray(K.cx, K.cy, &K, &yawed);
        assert!((r.direction - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
        assert_eq!(r.origin, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn offset_pixel_formula() {
        let r = pixel_to_ray(59.5, 9.5, &K, &Pose::default());
        // (u - cx) / f = 0.2 to the right (body -y), (v - cy) / f = -0.2 up.
        let n = (1.0f64 + 0.04 + 0.04).sqrt();
        let expect = Vec3::new(1.0 / n, -0.2 / n, 0.2 / n);
        assert!((r.direction - expect).norm() < 1e-9);
    }

    #[test]
    fn projection_roundtrip() {
        let pose = Pose::new(2.0, -1.0, 4.0, 0.05, 0.3, 2.2);
        for &(bx, by, bz) in &[(10.0, 0.5, -1.0), (9.0, -2.0, 1.5), (10.0, 0.0, 0.0)] {
            let p = pose.body_to_map(&Vec3::new(bx, by, bz));
            let (u, v) = project(&p, &K, &pose).unwrap();
            let r = pixel_to_ray(u, v, &K, &pose);
            let t = (p - r.origin).dot(&r.direction);
            assert!((r.point_at(t) - p).norm() < 1e-6);
        }
        assert!(project(&pose.body_to_map(&Vec3::new(-1.0, 0.0, 0.0)), &K, &pose).is_none());
    }
}
