use super::{Algorithm, Path, PlanError, PlanningGrid};
use crate::geometry::Vec3;
use crate::world_model::line_of_sight;

#[derive(Debug, Clone, PartialEq)]
pub enum ReplanOutcome {
    Unchanged,
    Replanned(Path),
}

/// Checks the active path against obstacles seen at run time. When a
/// segment is blocked, plans again from `current` to the path's goal on the
/// map augmented with those obstacles.
pub fn validate_and_replan(
    path: &Path,
    live_obstacles: &[Vec3],
    current: &Vec3,
    grid: &PlanningGrid,
) -> Result<ReplanOutcome, PlanError> {
    if live_obstacles.is_empty() || path.waypoints.len() < 2 {
        return Ok(ReplanOutcome::Unchanged);
    }
    let live = grid.with_obstacles(live_obstacles);
    let mut blocked = false;
    for w in path.waypoints.windows(2) {
        if !line_of_sight(&w[0], &w[1], live.map())? {
            blocked = true;
            break;
        }
    }
    if !blocked {
        return Ok(ReplanOutcome::Unchanged);
    }
    let goal = *path.goal().expect("non-empty path");
    log::debug!("path blocked by live obstacles, replanning from {current:?}");
    live.plan(current, &goal, Algorithm::LazyThetaStar).map(ReplanOutcome::Replanned)
}

#[cfg(test)]
mod tests {
    use super::super::PlanMode;
    use super::*;
    use crate::world_model::VoxelGrid;

    fn setup() -> (PlanningGrid, Path) {
        let m = VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [20, 20, 1]).unwrap();
        let g = PlanningGrid::new(&m, 1.0, PlanMode::TwoD, 0.0).unwrap();
        let p = g.plan(&Vec3::new(1.0, 10.0, 0.0), &Vec3::new(18.0, 10.0, 0.0), Algorithm::LazyThetaStar).unwrap();
        (g, p)
    }

    #[test]
    fn no_obstacles_unchanged() {
        let (g, p) = setup();
        assert_eq!(validate_and_replan(&p, &[], &Vec3::new(1.0, 10.0, 0.0), &g).unwrap(), ReplanOutcome::Unchanged);
    }

    #[test]
    fn off_path_obstacle_unchanged() {
        let (g, p) = setup();
        let r = validate_and_replan(&p, &[Vec3::new(9.0, 2.0, 0.0)], &Vec3::new(1.0, 10.0, 0.0), &g).unwrap();
        assert_eq!(r, ReplanOutcome::Unchanged);
    }

    #[test]
    fn blocking_obstacle_forces_detour() {
        let (g, p) = setup();
        let obs: Vec<Vec3> = (8..=12).map(|y| Vec3::new(9.0, y as f64, 0.0)).collect();
        let cur = Vec3::new(3.0, 10.0, 0.0);
        let ReplanOutcome::Replanned(np) = validate_and_replan(&p, &obs, &cur, &g).unwrap() else {
            panic!("expected a new path");
        };
        assert_eq!(np.waypoints[0], cur);
        assert_eq!(np.goal(), p.goal());
        // Supersample every segment and require clearance from each obstacle.
        for w in np.waypoints.windows(2) {
            for k in 0..=1000 {
                let q = w[0] + (w[1] - w[0]) * (k as f64 / 1000.0);
                for o in &obs {
                    let d = (q - o).norm();
                    assert!(d > 1.0, "sample {q:?} within {d} of {o:?}");
                }
            }
        }
    }
}
