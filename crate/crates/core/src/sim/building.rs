use super::rng::{substream, Stream};
use super::{Aabb, SimError};
use crate::geometry::Vec3;
use crate::world_model::VoxelGrid;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    North,
    South,
    East,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::North, Side::South, Side::East, Side::West];

    pub fn parse(s: &str) -> Option<Side> {
        match s.trim().to_ascii_lowercase().as_str() {
            "north" | "n" => Some(Side::North),
            "south" | "s" => Some(Side::South),
            "east" | "e" => Some(Side::East),
            "west" | "w" => Some(Side::West),
            _ => None,
        }
    }

    /// North and south walls run along x, east and west along y.
    fn along_x(self) -> bool {
        matches!(self, Side::North | Side::South)
    }
}

/// Rectangular hole through one wall. `center` is the coordinate along the
/// wall (x for north/south, y for east/west); `sill` is measured from the
/// ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Opening {
    pub side: Side,
    pub center: f64,
    pub width: f64,
    pub sill: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingParams {
    /// Map corner; a negative z leaves room for the ground slab.
    pub origin: Vec3,
    pub extent: Vec3,
    pub resolution: f64,
    pub footprint_min: [f64; 2],
    pub footprint_max: [f64; 2],
    pub floors: usize,
    pub floor_height: f64,
    pub wall_thickness: f64,
    pub doors: Vec<Opening>,
    pub windows_per_side: usize,
    pub window_width: f64,
    pub window_height: f64,
    /// Window sill above each floor's base.
    pub window_sill: f64,
    /// Fill `[origin.z, 0)` as ground.
    pub ground: bool,
    /// Extra solid boxes (furniture, debris).
    pub boxes: Vec<Aabb>,
    pub seed: u64,
}

impl Default for BuildingParams {
    fn default() -> Self {
        Self {
            origin: Vec3::new(0.0, 0.0, -0.25),
            extent: Vec3::new(20.0, 20.0, 4.25),
            resolution: 0.25,
            footprint_min: [5.0, 5.0],
            footprint_max: [15.0, 15.0],
            floors: 1,
            floor_height: 3.0,
            wall_thickness: 0.25,
            doors: Vec::new(),
            windows_per_side: 0,
            window_width: 1.0,
            window_height: 1.0,
            window_sill: 1.0,
            ground: true,
            boxes: Vec::new(),
            seed: 0,
        }
    }
}

impl BuildingParams {
    pub fn height(&self) -> f64 {
        self.floors as f64 * self.floor_height
    }

    /// Outer hull of the building.
    pub fn hull(&self) -> Aabb {
        Aabb::new(
            Vec3::new(self.footprint_min[0], self.footprint_min[1], 0.0),
            Vec3::new(self.footprint_max[0], self.footprint_max[1], self.height()),
        )
    }

    /// Free interior volume of floor `k`.
    pub fn floor_interior(&self, k: usize) -> Aabb {
        let t = self.wall_thickness;
        let base = k as f64 * self.floor_height;
        Aabb::new(
            Vec3::new(self.footprint_min[0] + t, self.footprint_min[1] + t, base),
            Vec3::new(self.footprint_max[0] - t, self.footprint_max[1] - t, base + self.floor_height - t),
        )
    }

    fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidBuilding(m));
        let positive = [
            self.resolution,
            self.extent.x,
            self.extent.y,
            self.extent.z,
            self.floor_height,
            self.wall_thickness,
        ];
        if positive.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
            return bad("dimensions must be positive".into());
        }
        if self.floors == 0 {
            return bad("at least one floor is required".into());
        }
        let t = self.wall_thickness;
        if t < self.resolution {
            return bad(format!("wall thickness {t} is thinner than one voxel"));
        }
        for k in 0..2 {
            let span = self.footprint_max[k] - self.footprint_min[k];
            if !(span > 2.0 * t + self.resolution) {
                return bad(format!("footprint span {span} leaves no interior"));
            }
        }
        if self.floor_height <= t + self.resolution {
            return bad("floor height leaves no interior".into());
        }
        let top = self.origin + self.extent;
        let inside = self.footprint_min[0] >= self.origin.x
            && self.footprint_min[1] >= self.origin.y
            && self.footprint_max[0] <= top.x
            && self.footprint_max[1] <= top.y
            && self.height() <= top.z
            && self.origin.z <= 0.0;
        if !inside {
            return bad("building does not fit inside the map".into());
        }
        for d in &self.doors {
            if !(d.width > 0.0 && d.height > 0.0 && d.sill >= 0.0) {
                return bad(format!("bad door {d:?}"));
            }
        }
        if self.windows_per_side > 0 && !(self.window_width > 0.0 && self.window_height > 0.0) {
            return bad("window size must be positive".into());
        }
        Ok(())
    }

    fn wall_range(&self, side: Side) -> (f64, f64) {
        if side.along_x() {
            (self.footprint_min[0], self.footprint_max[0])
        } else {
            (self.footprint_min[1], self.footprint_max[1])
        }
    }

    /// Box cut through the wall for an opening.
    fn cut(&self, o: &Opening) -> Aabb {
        let t = self.wall_thickness;
        let eps = 0.5 * self.resolution;
        let (a, b) = (o.center - 0.5 * o.width, o.center + 0.5 * o.width);
        let (z0, z1) = (o.sill, o.sill + o.height);
        let (fx0, fy0) = (self.footprint_min[0], self.footprint_min[1]);
        let (fx1, fy1) = (self.footprint_max[0], self.footprint_max[1]);
        match o.side {
            Side::South => Aabb::new(Vec3::new(a, fy0 - eps, z0), Vec3::new(b, fy0 + t + eps, z1)),
            Side::North => Aabb::new(Vec3::new(a, fy1 - t - eps, z0), Vec3::new(b, fy1 + eps, z1)),
            Side::West => Aabb::new(Vec3::new(fx0 - eps, a, z0), Vec3::new(fx0 + t + eps, b, z1)),
            Side::East => Aabb::new(Vec3::new(fx1 - t - eps, a, z0), Vec3::new(fx1 + eps, b, z1)),
        }
    }

    /// Seeded window layout: per floor and side, positions drawn uniformly
    /// along the wall, rejecting overlaps with other openings.
    pub fn windows(&self) -> Vec<Opening> {
        let mut rng = substream(self.seed, Stream::Building, 0, 0);
        let margin = self.wall_thickness + 0.5;
        let mut out: Vec<Opening> = Vec::new();
        for k in 0..self.floors {
            let sill = k as f64 * self.floor_height + self.window_sill;
            let top = (k + 1) as f64 * self.floor_height - self.wall_thickness;
            if sill + self.window_height > top {
                continue;
            }
            for side in Side::ALL {
                let (lo, hi) = self.wall_range(side);
                let (lo, hi) = (lo + margin + 0.5 * self.window_width, hi - margin - 0.5 * self.window_width);
                if lo >= hi {
                    continue;
                }
                let mut placed = 0;
                for _ in 0..100 {
                    if placed == self.windows_per_side {
                        break;
                    }
                    let center = rng.random_range(lo..hi);
                    let w = Opening {
                        side,
                        center,
                        width: self.window_width,
                        sill,
                        height: self.window_height,
                    };
                    let clash = out.iter().chain(self.doors.iter()).any(|o| {
                        o.side == side
                            && (o.center - center).abs() < 0.5 * (o.width + w.width) + 0.5
                            && o.sill < w.sill + w.height
                            && w.sill < o.sill + o.height
                    });
                    if !clash {
                        out.push(w);
                        placed += 1;
                    }
                }
            }
        }
        out
    }
}

/// Multi-floor shell: outer walls, one slab between floors, a roof, the
/// declared doors and seeded windows, plus the ground slab below `z = 0`.
pub fn generate_building(p: &BuildingParams) -> Result<VoxelGrid, SimError> {
    p.validate()?;
    let dims = [
        (p.extent.x / p.resolution).round() as usize,
        (p.extent.y / p.resolution).round() as usize,
        (p.extent.z / p.resolution).round() as usize,
    ];
    let mut map = VoxelGrid::new(p.origin, p.resolution, dims)?;
    if p.ground && p.origin.z < 0.0 {
        let top = p.origin + p.extent;
        map.fill_box(p.origin, Vec3::new(top.x, top.y, 0.0), true);
    }
    let t = p.wall_thickness;
    let h = p.height();
    let (fx0, fy0) = (p.footprint_min[0], p.footprint_min[1]);
    let (fx1, fy1) = (p.footprint_max[0], p.footprint_max[1]);
    map.fill_box(Vec3::new(fx0, fy0, 0.0), Vec3::new(fx1, fy0 + t, h), true);
    map.fill_box(Vec3::new(fx0, fy1 - t, 0.0), Vec3::new(fx1, fy1, h), true);
    map.fill_box(Vec3::new(fx0, fy0, 0.0), Vec3::new(fx0 + t, fy1, h), true);
    map.fill_box(Vec3::new(fx1 - t, fy0, 0.0), Vec3::new(fx1, fy1, h), true);
    for k in 1..=p.floors {
        let z = k as f64 * p.floor_height;
        map.fill_box(Vec3::new(fx0, fy0, z - t), Vec3::new(fx1, fy1, z), true);
    }
    for o in p.doors.iter().chain(p.windows().iter()) {
        let c = p.cut(o);
        map.fill_box(c.min, c.max, false);
    }
    for b in &p.boxes {
        map.fill_box(b.min, b.max, true);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world_model::write_map;
    use std::collections::VecDeque;

    fn shell(offset: f64) -> BuildingParams {
        BuildingParams {
            origin: Vec3::new(0.0, 0.0, 0.0),
            extent: Vec3::new(14.0, 14.0, 4.0),
            footprint_min: [2.0 + offset, 2.0 + offset],
            footprint_max: [12.0 + offset, 12.0 + offset],
            ground: false,
            ..Default::default()
        }
    }

    /// Walls over the full height plus a roof slab inside the walls.
    fn analytic_volume(p: &BuildingParams) -> f64 {
        let (lx, ly) = (p.footprint_max[0] - p.footprint_min[0], p.footprint_max[1] - p.footprint_min[1]);
        let t = p.wall_thickness;
        let (ix, iy) = (lx - 2.0 * t, ly - 2.0 * t);
        let walls = (lx * ly - ix * iy) * p.height();
        let slabs = ix * iy * t * p.floors as f64;
        walls + slabs
    }

    #[test]
    fn shell_volume_matches_formula() {
        for offset in [0.0, 0.1, 0.37] {
            let p = shell(offset);
            let m = generate_building(&p).unwrap();
            let cell = p.resolution.powi(3);
            let got = m.occupied_count() as f64 * cell;
            let want = analytic_volume(&p);
            assert!((got - want).abs() / want < 0.05, "offset {offset}: {got} vs {want}");
        }
    }

    fn flood_reaches(m: &VoxelGrid, from: Vec3, to: Vec3) -> bool {
        let g = m.geometry();
        let (s, t) = (g.world_to_cell(&from).unwrap(), g.world_to_cell(&to).unwrap());
        let mut seen = vec![false; g.len()];
        let mut q = VecDeque::from([s]);
        seen[g.linear(s)] = true;
        while let Some(c) = q.pop_front() {
            if c == t {
                return true;
            }
            for k in 0..3 {
                for d in [-1i64, 1] {
                    let v = c[k] as i64 + d;
                    if v < 0 || v >= g.dims[k] as i64 {
                        continue;
                    }
                    let mut n = c;
                    n[k] = v as usize;
                    let i = g.linear(n);
                    if !seen[i] && !m.is_occupied(n) {
                        seen[i] = true;
                        q.push_back(n);
                    }
                }
            }
        }
        false
    }

    #[test]
    fn indoor_reachable_iff_door() {
        let mut p = shell(0.0);
        let outdoor = Vec3::new(0.6, 0.6, 1.0);
        let indoor = Vec3::new(7.0, 7.0, 1.0);
        let closed = generate_building(&p).unwrap();
        assert!(!flood_reaches(&closed, outdoor, indoor));
        p.doors.push(Opening { side: Side::West, center: 7.0, width: 1.0, sill: 0.0, height: 2.0 });
        let open = generate_building(&p).unwrap();
        assert!(flood_reaches(&open, outdoor, indoor));
    }

    #[test]
    fn same_seed_same_bytes() {
        let p = BuildingParams { windows_per_side: 2, seed: 11, floors: 2, extent: Vec3::new(20.0, 20.0, 7.0), ..Default::default() };
        let bytes = |p: &BuildingParams| {
            let mut b = Vec::new();
            write_map(&generate_building(p).unwrap(), &mut b).unwrap();
            b
        };
        assert_eq!(bytes(&p), bytes(&p));
        assert_eq!(p.windows().len(), 16);
        let other = BuildingParams { seed: 12, ..p.clone() };
        assert_ne!(bytes(&p), bytes(&other));
    }

    #[test]
    fn degenerate_footprint_rejected() {
        let p = BuildingParams { footprint_max: [5.4, 15.0], ..Default::default() };
        assert!(matches!(generate_building(&p), Err(SimError::InvalidBuilding(_))));
        let p = BuildingParams { floors: 0, ..Default::default() };
        assert!(generate_building(&p).is_err());
    }

    #[test]
    fn ground_slab_below_zero() {
        let m = generate_building(&BuildingParams::default()).unwrap();
        assert_eq!(m.occupied_at(&Vec3::new(1.0, 1.0, -0.1)), Some(true));
        assert_eq!(m.occupied_at(&Vec3::new(1.0, 1.0, 0.1)), Some(false));
    }
}
