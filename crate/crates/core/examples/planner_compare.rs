//! Runs A*, Theta* and Lazy Theta* on seeded random 2D maps. With a
//! directory argument the maps are also written there, ready for
//! `embr bench-planner --maps <dir>`.

use embr::planner::{Algorithm, PlanMode, PlanningGrid};
use embr::world_model::{write_map_file, VoxelGrid};
use embr::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

const N: usize = 64;

fn random_map(rng: &mut ChaCha8Rng) -> VoxelGrid {
    let mut m = VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [N, N, 1]).unwrap();
    for y in 0..N {
        for x in 0..N {
            if rng.random_bool(0.2) {
                m.set([x, y, 0], true);
            }
        }
    }
    // keep the corners free for the query
    m.set([0, 0, 0], false);
    m.set([N - 1, N - 1, 0], false);
    m
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args().nth(1).map(PathBuf::from);
    if let Some(d) = &dir {
        std::fs::create_dir_all(d)?;
    }
    let (start, goal) = (Vec3::zeros(), Vec3::new((N - 1) as f64, (N - 1) as f64, 0.0));
    println!("{:>4} {:>12} {:>9} {:>9} {:>9}", "map", "algorithm", "length", "expand", "los");
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = random_map(&mut rng);
        if let Some(d) = &dir {
            write_map_file(&map, d.join(format!("random_{seed:02}.map")))?;
        }
        let grid = PlanningGrid::from_inflated(map, 0.0, PlanMode::TwoD);
        for algo in [Algorithm::AStar, Algorithm::ThetaStar, Algorithm::LazyThetaStar] {
            match grid.plan(&start, &goal, algo) {
                Ok(p) => println!(
                    "{seed:>4} {:>12} {:>9.3} {:>9} {:>9}",
                    algo.name(),
                    p.total_length,
                    p.expansions,
                    p.los_checks
                ),
                Err(e) => println!("{seed:>4} {:>12} {e}", algo.name()),
            }
        }
    }
    Ok(())
}
