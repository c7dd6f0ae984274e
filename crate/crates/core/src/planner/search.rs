use super::{polyline_length, Path, PlanError, PlanningGrid};
use crate::geometry::Vec3;
use crate::world_model::{line_of_sight, Cell, GridGeometry, VoxelGrid};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    AStar,
    ThetaStar,
    LazyThetaStar,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AStar => "astar",
            Algorithm::ThetaStar => "theta",
            Algorithm::LazyThetaStar => "lazytheta",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "astar" => Some(Algorithm::AStar),
            "theta" => Some(Algorithm::ThetaStar),
            "lazytheta" => Some(Algorithm::LazyThetaStar),
            _ => None,
        }
    }
}

/// Min-heap entry ordered by `(f, h, index)`.
#[derive(Debug, Clone, Copy)]
struct Entry {
    f: f64,
    h: f64,
    node: usize,
}

impl PartialEq for Entry {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Entry {}
impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        o.f.total_cmp(&self.f)
            .then_with(|| o.h.total_cmp(&self.h))
            .then_with(|| o.node.cmp(&self.node))
    }
}

const NONE: usize = usize::MAX;

struct Search<'a> {
    map: &'a VoxelGrid,
    geom: GridGeometry,
    start: Vec3,
    goal: Vec3,
    s_idx: usize,
    g_idx: usize,
    g: Vec<f64>,
    parent: Vec<usize>,
    closed: Vec<bool>,
    los_checks: u64,
    expansions: u64,
}

impl<'a> Search<'a> {
    fn pos(&self, i: usize) -> Vec3 {
        if i == self.s_idx {
            self.start
        } else if i == self.g_idx {
            self.goal
        } else {
            self.geom.cell_center(self.geom.unlinear(i))
        }
    }

    fn h(&self, i: usize) -> f64 {
        (self.goal - self.pos(i)).norm()
    }

    fn dist(&self, a: usize, b: usize) -> f64 {
        (self.pos(a) - self.pos(b)).norm()
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        let ca = self.geom.unlinear(a);
        let cb = self.geom.unlinear(b);
        (0..3).all(|k| ca[k].abs_diff(cb[k]) <= 1)
    }

    /// Move between grid neighbors. Between two cell centers the segment
    /// touches exactly the cells of their bounding box.
    fn edge_free(&self, a: usize, b: usize) -> bool {
        if a == self.s_idx || a == self.g_idx || b == self.s_idx || b == self.g_idx {
            return line_of_sight(&self.pos(a), &self.pos(b), self.map).unwrap_or(false);
        }
        let ca = self.geom.unlinear(a);
        let cb = self.geom.unlinear(b);
        let lo: Cell = [ca[0].min(cb[0]), ca[1].min(cb[1]), ca[2].min(cb[2])];
        let hi: Cell = [ca[0].max(cb[0]), ca[1].max(cb[1]), ca[2].max(cb[2])];
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    if self.map.is_occupied([x, y, z]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn visible(&mut self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        if self.adjacent(a, b) {
            return self.edge_free(a, b);
        }
        self.los_checks += 1;
        line_of_sight(&self.pos(a), &self.pos(b), self.map).unwrap_or(false)
    }

    fn neighbors(&self, i: usize) -> Vec<usize> {
        let c = self.geom.unlinear(i);
        let d = self.geom.dims;
        let mut out = Vec::with_capacity(26);
        for dz in -1i64..=1 {
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    if dx == 0 && dy == 0 && dz == 0 {
                        continue;
                    }
                    let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                    if (0..3).any(|k| n[k] < 0 || n[k] >= d[k] as i64) {
                        continue;
                    }
                    let n = [n[0] as usize, n[1] as usize, n[2] as usize];
                    if !self.map.is_occupied(n) {
                        out.push(self.geom.linear(n));
                    }
                }
            }
        }
        out
    }

    fn push(&self, heap: &mut BinaryHeap<Entry>, n: usize) {
        let h = self.h(n);
        heap.push(Entry { f: self.g[n] + h, h, node: n });
    }

    /// Deferred check of the optimistic parent; on failure the parent becomes
    /// the best closed neighbor.
    fn set_vertex(&mut self, s: usize) {
        let p = self.parent[s];
        if p == s || self.visible(p, s) {
            return;
        }
        let mut best = (f64::INFINITY, NONE);
        for n in self.neighbors(s) {
            if self.closed[n] && self.edge_free(n, s) {
                let c = self.g[n] + self.dist(n, s);
                if c < best.0 {
                    best = (c, n);
                }
            }
        }
        if best.1 != NONE {
            self.g[s] = best.0;
            self.parent[s] = best.1;
        }
    }

    fn run(&mut self, algo: Algorithm) -> bool {
        let mut heap = BinaryHeap::new();
        self.g[self.s_idx] = 0.0;
        self.parent[self.s_idx] = self.s_idx;
        self.push(&mut heap, self.s_idx);
        while let Some(Entry { node: s, .. }) = heap.pop() {
            if self.closed[s] {
                continue;
            }
            if algo == Algorithm::LazyThetaStar {
                self.set_vertex(s);
            }
            if s == self.g_idx {
                return true;
            }
            self.closed[s] = true;
            self.expansions += 1;
            for n in self.neighbors(s) {
                if self.closed[n] || !self.edge_free(s, n) {
                    continue;
                }
                let (cand, par) = match algo {
                    Algorithm::AStar => (self.g[s] + self.dist(s, n), s),
                    Algorithm::LazyThetaStar => {
                        let p = self.parent[s];
                        (self.g[p] + self.dist(p, n), p)
                    }
                    Algorithm::ThetaStar => {
                        let p = self.parent[s];
                        if self.visible(p, n) {
                            (self.g[p] + self.dist(p, n), p)
                        } else {
                            (self.g[s] + self.dist(s, n), s)
                        }
                    }
                };
                if cand < self.g[n] {
                    self.g[n] = cand;
                    self.parent[n] = par;
                    self.push(&mut heap, n);
                }
            }
        }
        false
    }

    fn path(&self) -> Vec<Vec3> {
        let mut idx = vec![self.g_idx];
        let mut cur = self.g_idx;
        while cur != self.s_idx {
            cur = self.parent[cur];
            idx.push(cur);
        }
        idx.reverse();
        idx.into_iter().map(|i| self.pos(i)).collect()
    }
}

pub(super) fn run(grid: &PlanningGrid, start: Vec3, goal: Vec3, algo: Algorithm) -> Result<Path, PlanError> {
    let geom = *grid.geometry();
    let map = grid.map();
    let sc = geom.world_to_cell(&start).ok_or(PlanError::OutOfBounds(start))?;
    let gc = geom.world_to_cell(&goal).ok_or(PlanError::OutOfBounds(goal))?;
    if grid.free_cell(&start).is_none() {
        return Err(PlanError::StartOccupied(start));
    }
    if grid.free_cell(&goal).is_none() {
        return Err(PlanError::GoalOccupied(goal));
    }
    let mut los_checks = 0;
    if algo != Algorithm::AStar || sc == gc {
        los_checks += 1;
        if line_of_sight(&start, &goal, map)? {
            let mut p = Path::from_waypoints(vec![start, goal]);
            p.los_checks = if algo == Algorithm::AStar { 0 } else { los_checks };
            return Ok(p);
        }
        if sc == gc {
            return Err(PlanError::Unreachable);
        }
    }
    let n = geom.len();
    let mut s = Search {
        map,
        geom,
        start,
        goal,
        s_idx: geom.linear(sc),
        g_idx: geom.linear(gc),
        g: vec![f64::INFINITY; n],
        parent: vec![NONE; n],
        closed: vec![false; n],
        los_checks,
        expansions: 0,
    };
    if !s.run(algo) {
        return Err(PlanError::Unreachable);
    }
    let waypoints = s.path();
    Ok(Path {
        total_length: polyline_length(&waypoints),
        waypoints,
        los_checks: s.los_checks,
        expansions: s.expansions,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{plan_a_star, plan_lazy_theta_star, PlanMode, PlanRequest};
    use super::*;

    fn grid2d(n: usize) -> VoxelGrid {
        VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [n, n, 1]).unwrap()
    }

    fn req(map: &VoxelGrid, a: Vec3, b: Vec3) -> PlanRequest<'_> {
        PlanRequest { start: a, goal: b, map, inflation_radius: 0.0, mode: PlanMode::ThreeD }
    }

    /// Plain Dijkstra over the 8-connected lattice of free cells with the
    /// same no-corner-cutting rule, written without any shared helpers.
    fn lattice_dijkstra(map: &VoxelGrid, a: [usize; 2], b: [usize; 2]) -> Option<f64> {
        let [nx, ny, _] = map.dims();
        let free = |x: i64, y: i64| {
            x >= 0 && y >= 0 && x < nx as i64 && y < ny as i64 && !map.is_occupied([x as usize, y as usize, 0])
        };
        let mut dist = vec![f64::INFINITY; nx * ny];
        let mut done = vec![false; nx * ny];
        dist[a[1] * nx + a[0]] = 0.0;
        loop {
            let mut u = None;
            for i in 0..nx * ny {
                if !done[i] && dist[i].is_finite() && u.is_none_or(|j: usize| dist[i] < dist[j]) {
                    u = Some(i);
                }
            }
            let u = u?;
            if u == b[1] * nx + b[0] {
                return Some(dist[u]);
            }
            done[u] = true;
            let (ux, uy) = ((u % nx) as i64, (u / nx) as i64);
            for dy in -1..=1i64 {
                for dx in -1..=1i64 {
                    let (vx, vy) = (ux + dx, uy + dy);
                    if (dx == 0 && dy == 0) || !free(vx, vy) {
                        continue;
                    }
                    if dx != 0 && dy != 0 && !(free(ux + dx, uy) && free(ux, uy + dy)) {
                        continue;
                    }
                    let v = vy as usize * nx + vx as usize;
                    let c = dist[u] + ((dx * dx + dy * dy) as f64).sqrt();
                    if c < dist[v] {
                        dist[v] = c;
                    }
                }
            }
        }
    }

    #[test]
    fn straight_line_in_free_space() {
        let m = grid2d(8);
        let p = plan_lazy_theta_star(&req(&m, Vec3::zeros(), Vec3::new(3.0, 4.0, 0.0))).unwrap();
        assert_eq!(p.waypoints.len(), 2);
        assert!((p.total_length - 5.0).abs() < 1e-9);
    }

    #[test]
    fn astar_matches_lattice_dijkstra() {
        let m = grid2d(8);
        let p = plan_a_star(&req(&m, Vec3::zeros(), Vec3::new(3.0, 4.0, 0.0))).unwrap();
        let oracle = lattice_dijkstra(&m, [0, 0], [3, 4]).unwrap();
        assert!((p.total_length - oracle).abs() < 1e-9, "{} vs {}", p.total_length, oracle);
    }

    #[test]
    fn astar_matches_lattice_dijkstra_with_walls() {
        let mut m = grid2d(12);
        for y in 0..10 {
            m.set([5, y, 0], true);
        }
        for y in 3..12 {
            m.set([8, y, 0], true);
        }
        let p = plan_a_star(&req(&m, Vec3::new(1.0, 1.0, 0.0), Vec3::new(11.0, 11.0, 0.0))).unwrap();
        let oracle = lattice_dijkstra(&m, [1, 1], [11, 11]).unwrap();
        assert!((p.total_length - oracle).abs() < 1e-9);
    }

    #[test]
    fn sealed_room_is_unreachable() {
        let mut m = grid2d(10);
        for i in 3..=7 {
            m.set([i, 3, 0], true);
            m.set([i, 7, 0], true);
            m.set([3, i, 0], true);
            m.set([7, i, 0], true);
        }
        for algo in [Algorithm::AStar, Algorithm::ThetaStar, Algorithm::LazyThetaStar] {
            let pg = PlanningGrid::from_inflated(m.clone(), 0.0, PlanMode::ThreeD);
            let r = pg.plan(&Vec3::new(1.0, 1.0, 0.0), &Vec3::new(5.0, 5.0, 0.0), algo);
            assert!(matches!(r, Err(PlanError::Unreachable)));
        }
    }

    #[test]
    fn occupied_endpoints_rejected() {
        let mut m = grid2d(6);
        m.set([2, 2, 0], true);
        let r = plan_lazy_theta_star(&req(&m, Vec3::new(2.0, 2.0, 0.0), Vec3::new(4.0, 4.0, 0.0)));
        assert!(matches!(r, Err(PlanError::StartOccupied(_))));
        let r = plan_lazy_theta_star(&req(&m, Vec3::new(0.0, 0.0, 0.0), Vec3::new(2.1, 1.9, 0.0)));
        assert!(matches!(r, Err(PlanError::GoalOccupied(_))));
    }

    #[test]
    fn three_d_climbs_over_wall() {
        let mut m = VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [10, 6, 5]).unwrap();
        for y in 0..6 {
            for z in 0..4 {
                m.set([5, y, z], true);
            }
        }
        let a = Vec3::new(1.0, 2.0, 0.0);
        let b = Vec3::new(9.0, 2.0, 0.0);
        let p = plan_lazy_theta_star(&req(&m, a, b)).unwrap();
        assert!(p.waypoints.iter().any(|w| w.z >= 3.5));
        for w in p.waypoints.windows(2) {
            assert!(line_of_sight(&w[0], &w[1], &m).unwrap());
        }
        let flat = PlanRequest { mode: PlanMode::TwoD, ..req(&m, a, b) };
        assert!(matches!(plan_lazy_theta_star(&flat), Err(PlanError::Unreachable)));
    }
}
