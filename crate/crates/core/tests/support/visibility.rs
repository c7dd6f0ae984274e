//! Shortest paths in the continuous plane among square obstacles, by
//! Dijkstra over the visibility graph of convex obstacle corners.

use embr::world_model::{line_of_sight, VoxelGrid};
use embr::Vec3;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const NUDGE: f64 = 1e-6;

/// Corners touched by exactly one occupied cell, pushed a hair away from it
/// along the diagonal.
pub fn convex_corners(map: &VoxelGrid) -> Vec<Vec3> {
    let [nx, ny, _] = map.dims();
    let res = map.resolution();
    let o = map.origin();
    let z = o.z + 0.5 * res;
    let occ = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64 && map.is_occupied([x as usize, y as usize, 0])
    };
    let mut out = Vec::new();
    for j in 0..=ny as i64 {
        for i in 0..=nx as i64 {
            let quads = [(i - 1, j - 1), (i, j - 1), (i - 1, j), (i, j)];
            let filled: Vec<usize> = (0..4).filter(|&q| occ(quads[q].0, quads[q].1)).collect();
            if filled.len() != 1 {
                continue;
            }
            let (cx, cy) = quads[filled[0]];
            let sx = if cx < i { 1.0 } else { -1.0 };
            let sy = if cy < j { 1.0 } else { -1.0 };
            let p = Vec3::new(
                o.x + i as f64 * res + sx * NUDGE * res,
                o.y + j as f64 * res + sy * NUDGE * res,
                z,
            );
            let inside = p.x > o.x && p.y > o.y && p.x < o.x + nx as f64 * res && p.y < o.y + ny as f64 * res;
            if inside {
                out.push(p);
            }
        }
    }
    out
}

#[derive(PartialEq)]
struct Item(f64, usize);
impl Eq for Item {}
impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Item {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
    }
}

/// Corners of the obstacles grown by half a cell: free cell centers whose
/// only occupied neighbor is a diagonal one.
pub fn inflated_corners(map: &VoxelGrid) -> Vec<Vec3> {
    let [nx, ny, _] = map.dims();
    let occ = |x: i64, y: i64| {
        x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64 && map.is_occupied([x as usize, y as usize, 0])
    };
    let mut out = Vec::new();
    for y in 0..ny as i64 {
        for x in 0..nx as i64 {
            if occ(x, y) {
                continue;
            }
            let mut count = 0;
            let mut diagonal = false;
            for dy in -1..=1 {
                for dx in -1..=1 {
                    if (dx, dy) != (0, 0) && occ(x + dx, y + dy) {
                        count += 1;
                        diagonal = dx != 0 && dy != 0;
                    }
                }
            }
            if count == 1 && diagonal {
                out.push(map.geometry().cell_center([x as usize, y as usize, 0]));
            }
        }
    }
    out
}

/// Every free cell center.
pub fn free_centers(map: &VoxelGrid) -> Vec<Vec3> {
    let g = map.geometry();
    (0..g.len())
        .filter(|&i| !map.occupancy()[i])
        .map(|i| g.cell_center(g.unlinear(i)))
        .collect()
}

/// Length of the shortest polyline from `a` to `b` bending only at
/// `vertices`, with every segment clear on `map`.
pub fn shortest_length(map: &VoxelGrid, a: Vec3, b: Vec3, vertices: Vec<Vec3>) -> Option<f64> {
    let mut nodes = vec![a, b];
    nodes.extend(vertices);
    let n = nodes.len();
    let mut g = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let h = |i: usize| (nodes[i] - b).norm();
    g[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Item(h(0), 0));
    while let Some(Item(_, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        if u == 1 {
            return Some(g[1]);
        }
        done[u] = true;
        for v in 0..n {
            if done[v] {
                continue;
            }
            let c = g[u] + (nodes[v] - nodes[u]).norm();
            if c < g[v] && line_of_sight(&nodes[u], &nodes[v], map).unwrap() {
                g[v] = c;
                heap.push(Item(c + h(v), v));
            }
        }
    }
    None
}
