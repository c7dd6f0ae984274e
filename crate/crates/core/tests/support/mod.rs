#![allow(dead_code)]

pub mod visibility;

use embr::planner::{Algorithm, PlanError, PlanMode, PlanningGrid};
use embr::world_model::VoxelGrid;
use embr::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Single-layer `n x n` map at 1 m cells with cell centers on integer
/// coordinates, each cell occupied with probability `density`.
pub fn random_map_2d<R: Rng>(n: usize, density: f64, rng: &mut R) -> VoxelGrid {
    let mut m = VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [n, n, 1]).unwrap();
    for y in 0..n {
        for x in 0..n {
            if rng.random::<f64>() < density {
                m.set([x, y, 0], true);
            }
        }
    }
    m
}

pub struct PlanInstance {
    pub grid: PlanningGrid,
    pub start: Vec3,
    pub goal: Vec3,
}

/// Random 64x64 map at 20% density with a connected start/goal pair at
/// least 30 m apart.
pub fn planner_instance(seed: u64) -> PlanInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let map = random_map_2d(64, 0.2, &mut rng);
        let grid = PlanningGrid::from_inflated(map, 0.0, PlanMode::TwoD);
        let pick = |rng: &mut ChaCha8Rng| loop {
            let c = [rng.random_range(0..64), rng.random_range(0..64), 0];
            if !grid.map().is_occupied(c) {
                return Vec3::new(c[0] as f64, c[1] as f64, 0.0);
            }
        };
        let start = pick(&mut rng);
        let goal = pick(&mut rng);
        if (goal - start).norm() < 30.0 {
            continue;
        }
        match grid.plan(&start, &goal, Algorithm::AStar) {
            Ok(_) => return PlanInstance { grid, start, goal },
            Err(PlanError::Unreachable) => continue,
            Err(e) => panic!("{e}"),
        }
    }
}

pub fn data(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

/// Position and yaw (degrees) RMSE of a robot over the second half of its
/// recorded ticks.
pub fn second_half_rmse(h: &embr::sim::RobotHistory) -> (f64, f64) {
    let n = h.trace.len();
    let (mut ep, mut ey) = (0.0, 0.0);
    for i in n / 2..n {
        let (e, t) = (&h.trace[i].estimate, &h.truth[i]);
        ep += (e.x - t.x).powi(2) + (e.y - t.y).powi(2) + (e.z - t.z).powi(2);
        ey += embr::geometry::angle_diff(e.yaw, t.yaw).powi(2);
    }
    let m = (n - n / 2).max(1) as f64;
    ((ep / m).sqrt(), (ey / m).sqrt().to_degrees())
}

/// Writes straight to the process stdout so the line survives the test
/// harness's output capture.
pub fn verdict(n: u32, name: &str, pass: bool, detail: &str) {
    use std::io::Write;
    let line = format!("criterion {n} {:<28} {}  {detail}\n", name, if pass { "PASS" } else { "FAIL" });
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}
