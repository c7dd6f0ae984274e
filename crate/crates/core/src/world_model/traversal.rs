//! Incremental voxel walking (Amanatides & Woo stepping). Every cell whose
//! interior the segment pierces is visited exactly once. When the segment
//! crosses an edge or corner exactly, the cells sharing that edge or corner
//! are visited too, so a segment cannot slip between two diagonal obstacles.

use super::{Cell, GridGeometry, VoxelGrid, WorldError};
use crate::geometry::Vec3;

/// Crossings closer than this many cell lengths count as simultaneous.
const TIE_CELLS: f64 = 1e-9;

struct Walk {
    cur: [i64; 3],
    step: [i64; 3],
    t_max: [f64; 3],
    t_delta: [f64; 3],
    end: Option<[i64; 3]>,
    t_end: f64,
    tie_eps: f64,
    dims: [i64; 3],
}

enum Visit {
    Continue,
    Stop,
}

impl Walk {
    fn new(
        geom: &GridGeometry,
        start: Vec3,
        start_cell: [i64; 3],
        dir: Vec3,
        t_end: f64,
        end: Option<[i64; 3]>,
    ) -> Self {
        let mut step = [0i64; 3];
        let mut t_max = [f64::INFINITY; 3];
        let mut t_delta = [f64::INFINITY; 3];
        for k in 0..3 {
            if dir[k] > 0.0 {
                step[k] = 1;
                t_max[k] = ((start_cell[k] + 1) as f64 - start[k]) / dir[k];
                t_delta[k] = 1.0 / dir[k];
            } else if dir[k] < 0.0 {
                step[k] = -1;
                t_max[k] = (start_cell[k] as f64 - start[k]) / dir[k];
                t_delta[k] = -1.0 / dir[k];
            }
        }
        let fastest = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Self {
            cur: start_cell,
            step,
            t_max,
            t_delta,
            end,
            t_end,
            tie_eps: TIE_CELLS / fastest.max(f64::MIN_POSITIVE),
            dims: geom.dims.map(|d| d as i64),
        }
    }

    fn in_bounds(&self, c: [i64; 3]) -> bool {
        (0..3).all(|k| c[k] >= 0 && c[k] < self.dims[k])
    }

    fn to_cell(c: [i64; 3]) -> Cell {
        [c[0] as usize, c[1] as usize, c[2] as usize]
    }

    /// Runs the walk; returns true if the visitor stopped it.
    fn run(mut self, visit: &mut dyn FnMut(Cell, f64) -> Visit) -> bool {
        if let Visit::Stop = visit(Self::to_cell(self.cur), 0.0) {
            return true;
        }
        loop {
            if self.end == Some(self.cur) {
                return false;
            }
            let movable = |k: usize| {
                self.step[k] != 0 && self.end.is_none_or(|e| self.cur[k] != e[k])
            };
            let mut t_min = f64::INFINITY;
            for k in 0..3 {
                if movable(k) && self.t_max[k] < t_min {
                    t_min = self.t_max[k];
                }
            }
            if !t_min.is_finite() || (self.end.is_none() && t_min > self.t_end) {
                return false;
            }
            let mut mask = 0usize;
            for k in 0..3 {
                if movable(k) && self.t_max[k] <= t_min + self.tie_eps {
                    mask |= 1 << k;
                }
            }
            if mask.count_ones() > 1 {
                // proper non-empty subsets of the tied axes
                let mut sub = (mask - 1) & mask;
                while sub != 0 {
                    let mut side = self.cur;
                    for k in 0..3 {
                        if sub & (1 << k) != 0 {
                            side[k] += self.step[k];
                        }
                    }
                    if self.in_bounds(side) {
                        if let Visit::Stop = visit(Self::to_cell(side), t_min) {
                            return true;
                        }
                    }
                    sub = (sub - 1) & mask;
                }
            }
            for k in 0..3 {
                if mask & (1 << k) != 0 {
                    self.cur[k] += self.step[k];
                    self.t_max[k] += self.t_delta[k];
                }
            }
            if !self.in_bounds(self.cur) {
                return false;
            }
            if let Visit::Stop = visit(Self::to_cell(self.cur), t_min) {
                return true;
            }
        }
    }
}

fn cell_i64(c: Cell) -> [i64; 3] {
    c.map(|v| v as i64)
}

fn segment_walk(geom: &GridGeometry, a: &Vec3, b: &Vec3) -> Result<Walk, WorldError> {
    let ca = geom
        .world_to_cell(a)
        .ok_or(WorldError::OutOfBounds(a.x, a.y, a.z))?;
    let cb = geom
        .world_to_cell(b)
        .ok_or(WorldError::OutOfBounds(b.x, b.y, b.z))?;
    let ga = geom.to_grid_coords(a);
    let gb = geom.to_grid_coords(b);
    Ok(Walk::new(geom, ga, cell_i64(ca), gb - ga, 1.0, Some(cell_i64(cb))))
}

/// Orders endpoints canonically so both directions walk identically.
fn canonical<'a>(a: &'a Vec3, b: &'a Vec3) -> (&'a Vec3, &'a Vec3) {
    let ka = (a.x, a.y, a.z);
    let kb = (b.x, b.y, b.z);
    if ka.partial_cmp(&kb) == Some(std::cmp::Ordering::Greater) {
        (b, a)
    } else {
        (a, b)
    }
}

/// Cells visited by the segment `a -> b`, in walk order from the canonical
/// first endpoint.
pub fn segment_cells(geom: &GridGeometry, a: &Vec3, b: &Vec3) -> Result<Vec<Cell>, WorldError> {
    let (a, b) = canonical(a, b);
    let mut cells = Vec::new();
    segment_walk(geom, a, b)?.run(&mut |c, _| {
        cells.push(c);
        Visit::Continue
    });
    Ok(cells)
}

/// True iff the segment crosses no occupied voxel. Symmetric in `a`, `b`.
pub fn line_of_sight(a: &Vec3, b: &Vec3, map: &VoxelGrid) -> Result<bool, WorldError> {
    let (a, b) = canonical(a, b);
    let blocked = segment_walk(map.geometry(), a, b)?.run(&mut |c, _| {
        if map.is_occupied(c) {
            Visit::Stop
        } else {
            Visit::Continue
        }
    });
    Ok(!blocked)
}

/// Entry and exit distances of a ray through an axis-aligned box.
fn clip_ray(origin: &Vec3, dir: &Vec3, lo: &Vec3, hi: &Vec3) -> Option<(f64, f64)> {
    let mut t0 = 0.0f64;
    let mut t1 = f64::INFINITY;
    for k in 0..3 {
        if dir[k] == 0.0 {
            if origin[k] < lo[k] || origin[k] >= hi[k] {
                return None;
            }
        } else {
            let a = (lo[k] - origin[k]) / dir[k];
            let b = (hi[k] - origin[k]) / dir[k];
            t0 = t0.max(a.min(b));
            t1 = t1.min(a.max(b));
        }
    }
    (t0 <= t1).then_some((t0, t1))
}

/// Distance along `direction` to the boundary of the first occupied voxel,
/// or `None` when nothing is hit within `max_range`. The direction is
/// normalized internally.
pub fn raycast(
    origin: &Vec3,
    direction: &Vec3,
    max_range: f64,
    map: &VoxelGrid,
) -> Result<Option<f64>, WorldError> {
    let norm = direction.norm();
    if !(norm > 1e-12 && norm.is_finite()) {
        return Err(WorldError::ZeroDirection);
    }
    let dir = direction / norm;
    let geom = map.geometry();
    let (t_enter, start_cell) = match geom.world_to_cell(origin) {
        Some(c) => (0.0, cell_i64(c)),
        None => {
            let Some((t0, _)) = clip_ray(origin, &dir, &geom.origin, &geom.max_corner()) else {
                return Ok(None);
            };
            if t0 > max_range {
                return Ok(None);
            }
            let g = geom.to_grid_coords(&(origin + dir * t0));
            let mut c = [0i64; 3];
            for k in 0..3 {
                c[k] = (g[k].floor() as i64).clamp(0, geom.dims[k] as i64 - 1);
            }
            (t0, c)
        }
    };
    let start = geom.to_grid_coords(&(origin + dir * t_enter));
    let walk = Walk::new(
        geom,
        start,
        start_cell,
        dir / geom.resolution,
        max_range - t_enter,
        None,
    );
    let mut hit = None;
    walk.run(&mut |c, t| {
        if map.is_occupied(c) {
            hit = Some(t_enter + t);
            Visit::Stop
        } else {
            Visit::Continue
        }
    });
    Ok(hit.filter(|&d| d <= max_range))
}
