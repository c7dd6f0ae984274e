mod support;

use embr::planner::{
    plan_lazy_theta_star, Algorithm, Path, PlanMode, PlanRequest, PlanningGrid,
};
use embr::world_model::{line_of_sight, VoxelGrid};
use embr::Vec3;
use support::visibility as vis;

fn assert_valid(p: &Path, map: &VoxelGrid, a: &Vec3, b: &Vec3) {
    assert_eq!(p.waypoints.first(), Some(a));
    assert_eq!(p.waypoints.last(), Some(b));
    for w in p.waypoints.windows(2) {
        assert!(line_of_sight(&w[0], &w[1], map).unwrap());
    }
    let sum: f64 = p.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
    assert!((sum - p.total_length).abs() < 1e-9);
    assert!(p.total_length >= (b - a).norm() - 1e-12);
}

#[test]
fn dominance_over_random_maps() {
    let mut same = 0;
    for seed in 0..100 {
        let inst = support::planner_instance(seed);
        let plan = |algo| inst.grid.plan(&inst.start, &inst.goal, algo).unwrap();
        let a = plan(Algorithm::AStar);
        let t = plan(Algorithm::ThetaStar);
        let l = plan(Algorithm::LazyThetaStar);
        for p in [&a, &t, &l] {
            assert_valid(p, inst.grid.map(), &inst.start, &inst.goal);
        }
        assert!(t.total_length <= a.total_length + 1e-9, "seed {seed}");
        assert!(l.total_length <= a.total_length + 1e-9, "seed {seed}");
        assert!(l.total_length <= t.total_length * 1.02, "seed {seed}");
        assert!(l.los_checks <= t.los_checks, "seed {seed}");
        if (l.total_length - t.total_length).abs() <= 1e-6 {
            same += 1;
        }
    }
    println!("lazy theta* matched theta* length on {same}/100 maps");
}

#[test]
fn repeated_requests_are_identical() {
    let inst = support::planner_instance(7);
    let a = inst.grid.plan(&inst.start, &inst.goal, Algorithm::LazyThetaStar).unwrap();
    let b = inst.grid.plan(&inst.start, &inst.goal, Algorithm::LazyThetaStar).unwrap();
    let bytes = |p: &Path| {
        let mut v = Vec::new();
        p.write_csv(&mut v).unwrap();
        v
    };
    assert_eq!(bytes(&a), bytes(&b));
    assert_eq!(a, b);
}

#[test]
fn wall_with_gap_matches_visibility_graph() {
    let mut m = VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [30, 30, 1]).unwrap();
    for y in 0..30 {
        if !(20..=21).contains(&y) {
            m.set([15, y, 0], true);
        }
    }
    let a = Vec3::new(3.0, 4.0, 0.0);
    let b = Vec3::new(27.0, 6.0, 0.0);
    let req = PlanRequest { start: a, goal: b, map: &m, inflation_radius: 0.0, mode: PlanMode::TwoD };
    let p = plan_lazy_theta_star(&req).unwrap();
    assert_valid(&p, &m, &a, &b);
    let grid_opt = vis::shortest_length(&m, a, b, vis::free_centers(&m)).unwrap();
    let corner_opt = vis::shortest_length(&m, a, b, vis::inflated_corners(&m)).unwrap();
    assert!(p.total_length <= grid_opt * 1.02, "{} vs {}", p.total_length, grid_opt);
    assert!(p.total_length <= corner_opt * 1.02, "{} vs {}", p.total_length, corner_opt);
    assert!(p.total_length >= grid_opt - 1e-9);
}

#[test]
fn straight_line_when_visible() {
    let inst = support::planner_instance(3);
    let g = inst.grid.map();
    for i in 0..64 {
        let a = Vec3::new((i % 8) as f64 * 8.0, (i / 8) as f64 * 8.0, 0.0);
        let b = Vec3::new(63.0 - a.x, 63.0 - a.y, 0.0);
        if g.occupied_at(&a) != Some(false) || g.occupied_at(&b) != Some(false) {
            continue;
        }
        if line_of_sight(&a, &b, g).unwrap() {
            let p = inst.grid.plan(&a, &b, Algorithm::LazyThetaStar).unwrap();
            assert_eq!(p.waypoints, vec![a, b]);
        }
    }
    let empty = PlanningGrid::from_inflated(
        VoxelGrid::new(Vec3::new(-0.5, -0.5, -0.5), 1.0, [10, 10, 1]).unwrap(),
        0.0,
        PlanMode::TwoD,
    );
    let p = empty.plan(&Vec3::new(0.3, 0.1, 0.0), &Vec3::new(8.2, 9.0, 0.0), Algorithm::LazyThetaStar).unwrap();
    assert_eq!(p.waypoints.len(), 2);
}
