use super::{ExactSum, FireError, RangeAssociation, RangeSource, Ray};
use crate::geometry::Vec3;
use nalgebra::{Cholesky, Matrix3};

/// Range-annotated bearing turned into a 3D pseudo-position with a
/// ray-aligned covariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FireMeasurement {
    pub origin: Vec3,
    pub direction: Vec3,
    pub range: f64,
    pub source: RangeSource,
    pub covariance: Matrix3<f64>,
}

impl FireMeasurement {
    /// `R = var_r d d^T + (r sigma_bearing)^2 (I - d d^T) + loc_cov`.
    pub fn new(ray: &Ray, assoc: &RangeAssociation, sigma_bearing: f64, loc_cov: &Matrix3<f64>) -> Self {
        let d = ray.direction;
        let ddt = d * d.transpose();
        let lateral = (assoc.range * sigma_bearing).powi(2);
        let covariance = ddt * assoc.variance + (Matrix3::identity() - ddt) * lateral + loc_cov;
        Self { origin: ray.origin, direction: d, range: assoc.range, source: assoc.source, covariance }
    }

    pub fn position(&self) -> Vec3 {
        self.origin + self.direction * self.range
    }
}

/// Information-form position belief. Entries are accumulated exactly, so
/// fusion order never changes the stored values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FireBelief {
    info: [ExactSum; 9],
    vec: [ExactSum; 3],
    pub measurement_count: usize,
}

impl FireBelief {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn information_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|r, c| self.info[3 * r + c].value())
    }

    pub fn information_vector(&self) -> Vec3 {
        Vec3::new(self.vec[0].value(), self.vec[1].value(), self.vec[2].value())
    }

    fn cholesky(&self) -> Option<Cholesky<f64, nalgebra::U3>> {
        (self.measurement_count > 0).then(|| Cholesky::new(self.information_matrix())).flatten()
    }

    /// `Y^-1 y`, once the information matrix is invertible.
    pub fn estimate(&self) -> Option<Vec3> {
        self.cholesky().map(|c| c.solve(&self.information_vector()))
    }

    pub fn covariance(&self) -> Option<Matrix3<f64>> {
        self.cholesky().map(|c| c.inverse())
    }

    fn add_information(&mut self, m: &Matrix3<f64>, v: &Vec3) {
        for r in 0..3 {
            for c in 0..3 {
                self.info[3 * r + c].add(m[(r, c)]);
            }
            self.vec[r].add(v[r]);
        }
    }
}

/// `Y += R^-1`, `y += R^-1 z` for the measurement's pseudo-position `z`.
pub fn if_update(belief: &FireBelief, m: &FireMeasurement) -> Result<FireBelief, FireError> {
    let chol = Cholesky::new(m.covariance).ok_or(FireError::SingularCovariance)?;
    let inv = chol.inverse();
    let inv = (inv + inv.transpose()) * 0.5;
    if !inv.iter().all(|v| v.is_finite()) {
        return Err(FireError::SingularCovariance);
    }
    let mut out = belief.clone();
    out.add_information(&inv, &(inv * m.position()));
    out.measurement_count += 1;
    Ok(out)
}

/// Sum of two beliefs built from disjoint measurement sets.
pub fn merge_beliefs(a: &FireBelief, b: &FireBelief) -> FireBelief {
    let mut out = a.clone();
    for k in 0..9 {
        out.info[k].add_sum(&b.info[k]);
    }
    for k in 0..3 {
        out.vec[k].add_sum(&b.vec[k]);
    }
    out.measurement_count += b.measurement_count;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meas(origin: Vec3, target: Vec3, range_sd: f64) -> FireMeasurement {
        let d = (target - origin).normalize();
        let r = (target - origin).norm();
        let a = RangeAssociation { range: r, source: RangeSource::Lidar, variance: range_sd * range_sd };
        FireMeasurement::new(&Ray { origin, direction: d }, &a, 0.005, &Matrix3::zeros())
    }

    #[test]
    fn single_measurement_inverts_to_pseudo_position() {
        let m = meas(Vec3::new(0.0, 0.0, 2.0), Vec3::new(4.0, 3.0, 1.0), 0.2);
        let b = if_update(&FireBelief::new(), &m).unwrap();
        assert!((b.estimate().unwrap() - m.position()).norm() < 1e-9);
        assert!(FireBelief::new().estimate().is_none());
    }

    #[test]
    fn perpendicular_views_match_least_squares() {
        let fire = Vec3::new(10.0, 10.0, 0.5);
        // Ranges biased along each ray; the lateral constraints pin the point.
        let m1 = meas(Vec3::new(0.0, 10.0, 0.5), fire + Vec3::new(0.8, 0.0, 0.0), 1.0);
        let m2 = meas(Vec3::new(10.0, 0.0, 0.5), fire + Vec3::new(0.0, -0.6, 0.0), 1.0);
        let b = if_update(&if_update(&FireBelief::new(), &m1).unwrap(), &m2).unwrap();
        let w1 = m1.covariance.try_inverse().unwrap();
        let w2 = m2.covariance.try_inverse().unwrap();
        let oracle = (w1 + w2).try_inverse().unwrap() * (w1 * m1.position() + w2 * m2.position());
        let est = b.estimate().unwrap();
        assert!((est - oracle).norm() < 1e-9);
        assert!((est - fire).norm() < 0.1);
        let tr = b.covariance().unwrap().trace();
        assert!(tr < m1.covariance.trace() && tr < m2.covariance.trace());
    }

    #[test]
    fn double_fusion_equals_half_covariance() {
        let m = meas(Vec3::zeros(), Vec3::new(3.0, -4.0, 1.0), 0.3);
        let twice = if_update(&if_update(&FireBelief::new(), &m).unwrap(), &m).unwrap();
        let half = FireMeasurement { covariance: m.covariance * 0.5, ..m };
        let once = if_update(&FireBelief::new(), &half).unwrap();
        let (a, b) = (twice.information_matrix(), once.information_matrix());
        assert!((a - b).abs().max() <= 1e-12 * a.abs().max());
        assert!((twice.estimate().unwrap() - once.estimate().unwrap()).norm() < 1e-9);
    }

    #[test]
    fn singular_covariance_rejected() {
        let mut m = meas(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), 0.1);
        m.covariance = Matrix3::zeros();
        assert_eq!(if_update(&FireBelief::new(), &m), Err(FireError::SingularCovariance));
    }

    #[test]
    fn merge_is_commutative_and_replays() {
        let ms: Vec<_> = (0..6)
            .map(|i| {
                let a = i as f64 * 0.9;
                meas(Vec3::new(8.0 * a.cos(), 8.0 * a.sin(), 1.0 + 0.1 * i as f64), Vec3::new(0.3, -0.2, 0.7), 0.1 + 0.05 * i as f64)
            })
            .collect();
        let fold = |xs: &[FireMeasurement]| xs.iter().fold(FireBelief::new(), |b, m| if_update(&b, m).unwrap());
        let a = fold(&ms[..2]);
        let b = fold(&ms[2..]);
        let ab = merge_beliefs(&a, &b);
        let ba = merge_beliefs(&b, &a);
        assert_eq!(ab.information_matrix(), ba.information_matrix());
        assert_eq!(ab.information_vector(), ba.information_vector());
        let seq = fold(&ms);
        assert_eq!(ab.information_matrix(), seq.information_matrix());
        assert_eq!(ab.information_vector(), seq.information_vector());
        assert_eq!(ab.measurement_count, 6);
        assert_eq!(merge_beliefs(&a, &FireBelief::new()), a);
    }
}
