//! Occupancy map, distance field, likelihood grid and the voxel-walking
//! queries (line of sight, raycast) shared by the planner, the simulator and
//! fire estimation.

mod edt;
mod io;
mod likelihood;
mod traversal;

pub use edt::{nearest_occupied_distance_field, DistanceField};
pub use io::{read_map, read_map_file, write_map, write_map_file, MAP_MAGIC};
pub use likelihood::{build_likelihood_grid, LikelihoodGrid};
pub use traversal::{line_of_sight, raycast, segment_cells};

use crate::geometry::Vec3;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WorldError {
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),
    #[error("map has no occupied voxels")]
    EmptyMap,
    #[error("position ({0:.3}, {1:.3}, {2:.3}) is outside the map")]
    OutOfBounds(f64, f64, f64),
    #[error("ray direction has zero length")]
    ZeroDirection,
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
    #[error("map file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Integer cell coordinates `[ix, iy, iz]`.
pub type Cell = [usize; 3];

/// Placement of a dense grid in the map frame. Cells are half-open boxes
/// `[origin + i*res, origin + (i+1)*res)`; continuous quantities refer to
/// cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub origin: Vec3,
    pub resolution: f64,
    pub dims: [usize; 3],
}

impl GridGeometry {
    pub fn new(origin: Vec3, resolution: f64, dims: [usize; 3]) -> Result<Self, WorldError> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(WorldError::InvalidGeometry(format!("resolution {resolution}")));
        }
        if dims.contains(&0) {
            return Err(WorldError::InvalidGeometry(format!("dims {dims:?}")));
        }
        if !origin.iter().all(|v| v.is_finite()) {
            return Err(WorldError::InvalidGeometry("non-finite origin".into()));
        }
        Ok(Self { origin, resolution, dims })
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Linear index, x fastest.
    #[inline]
    pub fn linear(&self, c: Cell) -> usize {
        c[0] + self.dims[0] * (c[1] + self.dims[1] * c[2])
    }

    #[inline]
    pub fn unlinear(&self, i: usize) -> Cell {
        let nx = self.dims[0];
        let ny = self.dims[1];
        [i % nx, (i / nx) % ny, i / (nx * ny)]
    }

    /// `floor((p - origin) / resolution)`, or `None` outside the grid.
    #[inline]
    pub fn world_to_cell(&self, p: &Vec3) -> Option<Cell> {
        let mut c = [0usize; 3];
        for k in 0..3 {
            let g = ((p[k] - self.origin[k]) / self.resolution).floor();
            if !(g >= 0.0 && g < self.dims[k] as f64) {
                return None;
            }
            c[k] = g as usize;
        }
        Some(c)
    }

    #[inline]
    pub fn cell_center(&self, c: Cell) -> Vec3 {
        Vec3::new(
            self.origin.x + (c[0] as f64 + 0.5) * self.resolution,
            self.origin.y + (c[1] as f64 + 0.5) * self.resolution,
            self.origin.z + (c[2] as f64 + 0.5) * self.resolution,
        )
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.world_to_cell(p).is_some()
    }

    pub fn max_corner(&self) -> Vec3 {
        self.origin
            + Vec3::new(
                self.dims[0] as f64,
                self.dims[1] as f64,
                self.dims[2] as f64,
            ) * self.resolution
    }

    /// Continuous grid coordinates (cells as unit cubes).
    #[inline]
    pub fn to_grid_coords(&self, p: &Vec3) -> Vec3 {
        (p - self.origin) / self.resolution
    }
}

/// Dense boolean occupancy map.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    geometry: GridGeometry,
    occupancy: Vec<bool>,
}

impl VoxelGrid {
    /// All-free grid.
    pub fn new(origin: Vec3, resolution: f64, dims: [usize; 3]) -> Result<Self, WorldError> {
        let geometry = GridGeometry::new(origin, resolution, dims)?;
        Ok(Self { occupancy: vec![false; geometry.len()], geometry })
    }

    pub fn from_occupancy(geometry: GridGeometry, occupancy: Vec<bool>) -> Result<Self, WorldError> {
        if occupancy.len() != geometry.len() {
            return Err(WorldError::InvalidGeometry(format!(
                "occupancy has {} cells, geometry needs {}",
                occupancy.len(),
                geometry.len()
            )));
        }
        Ok(Self { geometry, occupancy })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn origin(&self) -> Vec3 {
        self.geometry.origin
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    pub fn dims(&self) -> [usize; 3] {
        self.geometry.dims
    }

    pub fn occupancy(&self) -> &[bool] {
        &self.occupancy
    }

    #[inline]
    pub fn is_occupied(&self, c: Cell) -> bool {
        self.occupancy[self.geometry.linear(c)]
    }

    /// Occupancy at a world position; `None` when outside the grid.
    pub fn occupied_at(&self, p: &Vec3) -> Option<bool> {
        self.geometry.world_to_cell(p).map(|c| self.is_occupied(c))
    }

    pub fn set(&mut self, c: Cell, occupied: bool) {
        let i = self.geometry.linear(c);
        self.occupancy[i] = occupied;
    }

    /// Marks every cell whose center lies inside the axis-aligned box.
    pub fn fill_box(&mut self, min: Vec3, max: Vec3, occupied: bool) {
        let g = self.geometry;
        let lo = |k: usize| {
            (((min[k] - g.origin[k]) / g.resolution - 0.5).ceil().max(0.0)) as usize
        };
        let hi = |k: usize| {
            let v = ((max[k] - g.origin[k]) / g.resolution - 0.5).floor();
            if v < 0.0 {
                None
            } else {
                Some((v as usize).min(g.dims[k] - 1))
            }
        };
        let (Some(hx), Some(hy), Some(hz)) = (hi(0), hi(1), hi(2)) else {
            return;
        };
        for z in lo(2)..=hz {
            for y in lo(1)..=hy {
                for x in lo(0)..=hx {
                    self.set([x, y, z], occupied);
                }
            }
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupancy.iter().filter(|&&o| o).count()
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.occupancy
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| self.geometry.unlinear(i))
    }

    /// Single z layer as a one-cell-thick grid, keeping the layer's height.
    pub fn slice_z(&self, layer: usize) -> Result<VoxelGrid, WorldError> {
        let g = self.geometry;
        if layer >= g.dims[2] {
            return Err(WorldError::InvalidGeometry(format!("layer {layer} out of range")));
        }
        let origin = Vec3::new(
            g.origin.x,
            g.origin.y,
            g.origin.z + layer as f64 * g.resolution,
        );
        let n = g.dims[0] * g.dims[1];
        let occ = self.occupancy[layer * n..(layer + 1) * n].to_vec();
        VoxelGrid::from_occupancy(
            GridGeometry::new(origin, g.resolution, [g.dims[0], g.dims[1], 1])?,
            occ,
        )
    }

    /// Index of the z layer containing height `z`.
    pub fn layer_of(&self, z: f64) -> Option<usize> {
        let g = self.geometry;
        let k = ((z - g.origin.z) / g.resolution).floor();
        (k >= 0.0 && k < g.dims[2] as f64).then_some(k as usize)
    }

    /// Cell-wise union with another grid of identical geometry.
    pub fn union(&self, other: &VoxelGrid) -> Result<VoxelGrid, WorldError> {
        if self.geometry != other.geometry {
            return Err(WorldError::InvalidGeometry("union of mismatched grids".into()));
        }
        let occ = self
            .occupancy
            .iter()
            .zip(&other.occupancy)
            .map(|(a, b)| *a || *b)
            .collect();
        VoxelGrid::from_occupancy(self.geometry, occ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn world_to_cell_is_floor() {
        let g = GridGeometry::new(Vec3::new(-1.0, 0.0, 0.0), 0.5, [4, 2, 1]).unwrap();
        assert_eq!(g.world_to_cell(&Vec3::new(-1.0, 0.0, 0.0)), Some([0, 0, 0]));
        assert_eq!(g.world_to_cell(&Vec3::new(-0.51, 0.99, 0.2)), Some([0, 1, 0]));
        assert_eq!(g.world_to_cell(&Vec3::new(0.99, 0.0, 0.0)), Some([3, 0, 0]));
        assert_eq!(g.world_to_cell(&Vec3::new(1.0, 0.0, 0.0)), None);
        assert_eq!(g.world_to_cell(&Vec3::new(-1.01, 0.0, 0.0)), None);
        assert_eq!(g.world_to_cell(&Vec3::new(0.0, f64::NAN, 0.0)), None);
    }

    #[test]
    fn linear_roundtrip() {
        let g = GridGeometry::new(Vec3::zeros(), 1.0, [3, 4, 5]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.linear(g.unlinear(i)), i);
        }
        assert_eq!(g.linear([1, 0, 0]), 1);
        assert_eq!(g.linear([0, 1, 0]), 3);
    }

    #[test]
    fn invalid_geometry() {
        assert!(VoxelGrid::new(Vec3::zeros(), 0.0, [1, 1, 1]).is_err());
        assert!(VoxelGrid::new(Vec3::zeros(), 1.0, [1, 0, 1]).is_err());
        assert!(VoxelGrid::new(Vec3::zeros(), -1.0, [1, 1, 1]).is_err());
    }

    #[test]
    fn fill_box_uses_centers() {
        let mut m = VoxelGrid::new(Vec3::zeros(), 1.0, [5, 5, 1]).unwrap();
        m.fill_box(Vec3::new(0.9, 0.0, 0.0), Vec3::new(2.5, 0.6, 1.0), true);
        let cells: Vec<_> = m.occupied_cells().collect();
        assert_eq!(cells, vec![[1, 0, 0], [2, 0, 0]]);
    }

    #[test]
    fn slice_keeps_height() {
        let mut m = VoxelGrid::new(Vec3::new(0.0, 0.0, -1.0), 0.5, [2, 2, 4]).unwrap();
        m.set([1, 1, 2], true);
        let s = m.slice_z(2).unwrap();
        assert_eq!(s.dims(), [2, 2, 1]);
        assert!(s.is_occupied([1, 1, 0]));
        assert_eq!(s.origin().z, 0.0);
        assert_eq!(m.layer_of(0.1), Some(2));
    }
}
