use super::{nearest_occupied_distance_field, Cell, GridGeometry, VoxelGrid, WorldError};
use crate::geometry::Vec3;
use std::f64::consts::PI;

/// Precomputed sensor model: every cell stores the Gaussian density of the
/// distance from its center to the closest occupied voxel center.
/// Immutable once built.
#[derive(Debug, Clone)]
pub struct LikelihoodGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
    sigma: f64,
    truncation_radius: f64,
}

impl LikelihoodGrid {
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn truncation_radius(&self) -> f64 {
        self.truncation_radius
    }

    /// `1 / sqrt(2 pi sigma^2)`, the value stored at occupied cells.
    pub fn peak(&self) -> f64 {
        gaussian_peak(self.sigma)
    }

    #[inline]
    pub fn at(&self, c: Cell) -> f64 {
        self.values[self.geometry.linear(c)]
    }

    /// Value of the cell containing `p`; zero outside the grid.
    #[inline]
    pub fn value_at(&self, p: &Vec3) -> f64 {
        match self.geometry.world_to_cell(p) {
            Some(c) => self.values[self.geometry.linear(c)],
            None => 0.0,
        }
    }
}

pub(crate) fn gaussian_peak(sigma: f64) -> f64 {
    1.0 / (2.0 * PI * sigma * sigma).sqrt()
}

/// Builds the likelihood grid from the exact distance field. Cells farther
/// than `truncation_radius` from any obstacle store 0.
pub fn build_likelihood_grid(
    map: &VoxelGrid,
    sigma: f64,
    truncation_radius: f64,
) -> Result<LikelihoodGrid, WorldError> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(WorldError::InvalidSigma(sigma));
    }
    if !(truncation_radius >= 0.0) {
        return Err(WorldError::InvalidGeometry(format!(
            "truncation radius {truncation_radius}"
        )));
    }
    let field = nearest_occupied_distance_field(map)?;
    let peak = gaussian_peak(sigma);
    let two_var = 2.0 * sigma * sigma;
    let values = field
        .values()
        .iter()
        .map(|&d| {
            if d > truncation_radius {
                0.0
            } else {
                peak * (-(d * d) / two_var).exp()
            }
        })
        .collect();
    Ok(LikelihoodGrid {
        geometry: *map.geometry(),
        values,
        sigma,
        truncation_radius,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_at_occupied_cell() {
        let mut m = VoxelGrid::new(Vec3::zeros(), 0.5, [5, 5, 5]).unwrap();
        m.set([2, 2, 2], true);
        let g = build_likelihood_grid(&m, 0.5, 1.5).unwrap();
        assert!((g.at([2, 2, 2]) - 0.797_884_560_802_865_4).abs() < 1e-12);
        // one cell away is exactly sigma
        let expect = g.peak() * (-0.5f64).exp();
        assert!((g.at([3, 2, 2]) - expect).abs() < 1e-15);
        assert!((g.value_at(&Vec3::new(1.6, 1.2, 1.4)) - expect).abs() < 1e-15);
        assert_eq!(g.value_at(&Vec3::new(-0.1, 1.0, 1.0)), 0.0);
    }

    #[test]
    fn truncation_zeroes_far_cells() {
        let mut m = VoxelGrid::new(Vec3::zeros(), 1.0, [8, 1, 1]).unwrap();
        m.set([0, 0, 0], true);
        let g = build_likelihood_grid(&m, 1.0, 3.0).unwrap();
        assert!(g.at([3, 0, 0]) > 0.0);
        assert_eq!(g.at([4, 0, 0]), 0.0);
        assert_eq!(g.at([7, 0, 0]), 0.0);
    }

    #[test]
    fn rejects_empty_and_bad_sigma() {
        let mut m = VoxelGrid::new(Vec3::zeros(), 1.0, [2, 2, 2]).unwrap();
        assert!(matches!(build_likelihood_grid(&m, 0.5, 1.5), Err(WorldError::EmptyMap)));
        m.set([0, 0, 0], true);
        assert!(matches!(build_likelihood_grid(&m, 0.0, 1.5), Err(WorldError::InvalidSigma(_))));
    }
}
