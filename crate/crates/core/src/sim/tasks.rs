//! Leaf tasks of the fire mission, run against the simulated robot.

use super::kinematics::{face, pursue, Pursuit};
use super::rng::{substream, Stream};
use super::runner::{FireTruth, RobotState, World};
use super::scenario::{RobotConfig, Scenario};
use super::sensors::synth_lidar;
use super::thermal::{synth_thermal, visible, FireSpot};
use super::Aabb;
use crate::coordination::{Grant, RobotKind, Task, ZoneRegistry};
use crate::executive::{Blackboard, Status, TaskRuntime, TaskState, Value};
use crate::fire::{associate_range, pixel_to_ray, segment_fire, FireMeasurement, ThermalImage};
use crate::geometry::{angle_diff, parse_vec3, Pose, Vec3};
use crate::planner::{validate_and_replan, Algorithm, Path, PlanningGrid, ReplanOutcome};
use nalgebra::Matrix3;
use std::collections::BTreeSet;

/// Occluder allowance at the fire end of a sight line.
const FIRE_MARGIN: f64 = 0.5;
/// Cloud points farther than this from known structure count as new
/// obstacles.
const LIVE_CLEARANCE: f64 = 0.75;
const LIVE_RANGE: f64 = 6.0;

/// Where a robot may engage fires.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Region {
    include: Vec<Aabb>,
    exclude: Vec<Aabb>,
}

impl Region {
    pub fn contains(&self, p: &Vec3) -> bool {
        self.include.iter().any(|b| b.contains(p)) && !self.exclude.iter().any(|b| b.contains(p))
    }
}

pub(crate) struct RolePlan {
    pub role: String,
    pub waypoints: Vec<Vec3>,
    pub face_hull: Vec<bool>,
    pub region: Region,
}

/// Closed loop over the corners of `b` at height `z`, starting at the
/// corner nearest `from` and visiting edge midpoints on the way.
fn ring(b: &Aabb, z: f64, from: &Vec3) -> Vec<Vec3> {
    let c = [
        Vec3::new(b.min.x, b.min.y, z),
        Vec3::new(b.max.x, b.min.y, z),
        Vec3::new(b.max.x, b.max.y, z),
        Vec3::new(b.min.x, b.max.y, z),
    ];
    let first = (0..4)
        .min_by(|&i, &j| (c[i] - from).norm().total_cmp(&(c[j] - from).norm()))
        .unwrap_or(0);
    let mut out = Vec::new();
    for k in 0..4 {
        let a = c[(first + k) % 4];
        let n = c[(first + k + 1) % 4];
        out.push(a);
        out.push(0.5 * (a + n));
    }
    out.push(c[first]);
    out
}

/// Exploration loop, face-the-building flags and engagement region for the
/// tasks allocated to one robot.
pub(crate) fn role_plan(s: &Scenario, cfg: &RobotConfig, tasks: &[Task]) -> RolePlan {
    let b = &s.building;
    let hull = b.hull();
    let h = b.floor_height;
    let map = Aabb::new(b.origin, b.origin + b.extent);
    let standoff = s.mission.standoff;
    let mut plan = RolePlan { role: String::new(), waypoints: Vec::new(), face_hull: Vec::new(), region: Region::default() };
    let mut from = cfg.start.position();
    let mut names = Vec::new();
    for t in tasks {
        let (wps, faces) = match t {
            Task::IndoorFloor(k) => {
                names.push(format!("indoor{k}"));
                let inner = b.floor_interior(*k);
                let inset = 2.0f64.min(0.5 * (inner.max.x - inner.min.x).min(inner.max.y - inner.min.y) - 0.5).max(0.5);
                let z = if cfg.kind == RobotKind::Ugv { cfg.start.z } else { *k as f64 * h + 0.5 * h };
                plan.region.include.push(inner);
                let w = ring(&inner.expanded(-inset), z, &from);
                let n = w.len();
                (w, vec![false; n])
            }
            Task::Floor(k) => {
                names.push(format!("floor{k}"));
                let z = *k as f64 * h + 0.5 * h;
                let band = Aabb::new(
                    hull.min - Vec3::new(standoff + 3.0, standoff + 3.0, 0.0),
                    hull.max + Vec3::new(standoff + 3.0, standoff + 3.0, 0.0),
                );
                plan.region.include.push(Aabb::new(
                    Vec3::new(band.min.x, band.min.y, *k as f64 * h),
                    Vec3::new(band.max.x, band.max.y, (*k + 1) as f64 * h),
                ));
                plan.region.exclude.push(hull);
                let w = ring(&hull.expanded(standoff), z, &from);
                let n = w.len();
                (w, vec![true; n])
            }
            Task::OutdoorAndGroundFacade => {
                names.push("outdoor".into());
                plan.region.include.push(Aabb::new(
                    Vec3::new(map.min.x, map.min.y, map.min.z),
                    Vec3::new(map.max.x, map.max.y, h),
                ));
                plan.region.exclude.push(hull);
                let near = ring(&hull.expanded(standoff), (0.5 * h).min(1.5), &from);
                let far_box = hull.expanded(2.0 * standoff);
                let far = ring(&far_box, (0.5 * h).max(2.5), near.last().unwrap_or(&from));
                let mut faces = vec![true; near.len()];
                faces.extend(vec![false; far.len()]);
                (near.into_iter().chain(far).collect(), faces)
            }
        };
        from = *wps.last().unwrap_or(&from);
        plan.waypoints.extend(wps);
        plan.face_hull.extend(faces);
    }
    // Keep loops inside the map.
    for w in &mut plan.waypoints {
        let lo = map.min + Vec3::repeat(1.0);
        let hi = map.max - Vec3::repeat(1.0);
        w.x = w.x.clamp(lo.x, hi.x);
        w.y = w.y.clamp(lo.y, hi.y);
    }
    plan.role = if names.is_empty() { "none".into() } else { names.join("+") };
    plan
}

/// Adds cloud returns far from any known structure to the robot's live
/// obstacle set.
pub(crate) fn update_live_obstacles(r: &mut RobotState, world: &World) {
    let Some(cloud) = &r.cloud else { return };
    let est = r.estimated_pose();
    let g = *world.known_map.geometry();
    for p in cloud {
        if p.norm() > LIVE_RANGE {
            continue;
        }
        let w = est.body_to_map(p);
        if w.z < 0.15 {
            continue;
        }
        let Some(c) = g.world_to_cell(&w) else { continue };
        if world.known_field.at(c) > LIVE_CLEARANCE && r.live_cells.insert(c) {
            r.live_points.push(g.cell_center(c));
            r.live_dirty = true;
        }
    }
}

#[derive(Debug, Clone)]
struct Nav {
    pursuit: Pursuit,
    goal: Vec3,
    face_hull: bool,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct TaskMemory {
    face_flags: Vec<bool>,
    nav: Option<Nav>,
    queue: Vec<Vec3>,
    next: usize,
    dwell: u64,
    elapsed: u64,
    engaged: BTreeSet<u32>,
}

enum NavStatus {
    Moving,
    Waiting,
    Arrived,
    Failed(String),
}

/// Everything a leaf needs for one tick of one robot.
pub(crate) struct TaskCtx<'a> {
    pub robot: &'a mut RobotState,
    pub world: &'a World,
    pub registry: &'a mut ZoneRegistry,
    pub fires: &'a mut [FireTruth],
    pub events: &'a mut Vec<String>,
    pub tick: u64,
}

/// Nearest free planning cell center to `p` within `max_r`.
fn nearest_free(grid: &PlanningGrid, p: &Vec3, max_r: f64) -> Option<Vec3> {
    let p = grid.project(p);
    if grid.free_cell(&p).is_some() {
        return Some(p);
    }
    let g = *grid.geometry();
    let c = g.world_to_cell(&p)?;
    let reach = (max_r / g.resolution).ceil() as i64;
    let mut best: Option<(f64, Vec3)> = None;
    for dz in -reach..=reach {
        for dy in -reach..=reach {
            for dx in -reach..=reach {
                let n = [c[0] as i64 + dx, c[1] as i64 + dy, c[2] as i64 + dz];
                if (0..3).any(|k| n[k] < 0 || n[k] >= g.dims[k] as i64) {
                    continue;
                }
                let n = [n[0] as usize, n[1] as usize, n[2] as usize];
                if grid.map().is_occupied(n) {
                    continue;
                }
                let q = g.cell_center(n);
                let d = (q - p).norm();
                if d <= max_r && best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, q));
                }
            }
        }
    }
    best.map(|(_, q)| q)
}

impl TaskMemory {
    pub fn with_face_flags(face_flags: Vec<bool>) -> Self {
        Self { face_flags, ..Default::default() }
    }
}

impl TaskCtx<'_> {
    fn event(&mut self, what: &str, detail: &str) {
        self.events.push(format!("{},{},{what},{}", self.tick, self.robot.cfg.id, detail.replace(',', ";")));
    }

    fn camera(&self, p: &Pose) -> Pose {
        Pose::new(p.x, p.y, p.z, 0.0, self.robot.cfg.camera_pitch, p.yaw)
    }

    fn live_grid(&self) -> PlanningGrid {
        if self.robot.live_points.is_empty() {
            (*self.robot.grid).clone()
        } else {
            self.robot.grid.with_obstacles(&self.robot.live_points)
        }
    }

    fn start_nav(&mut self, goal: &Vec3, face_hull: bool) -> Result<(), String> {
        let grid = self.live_grid();
        let here = self.robot.estimated_pose().position();
        let start = nearest_free(&grid, &here, 1.0).ok_or("no free cell near the robot")?;
        let target = nearest_free(&grid, goal, 1.0).ok_or("goal is blocked")?;
        let path = grid.plan(&start, &target, Algorithm::LazyThetaStar).map_err(|e| e.to_string())?;
        self.event("plan", &format!("{:.2} m to {:.2} {:.2} {:.2}", path.total_length, target.x, target.y, target.z));
        let goal = *path.goal().unwrap_or(&target);
        self.robot.memory.nav = Some(Nav { pursuit: Pursuit::new(path.waypoints), goal, face_hull });
        Ok(())
    }

    fn arrived(&self, p: &Vec3, goal: &Vec3) -> bool {
        let d = goal - p;
        let d = if self.robot.cfg.kind == RobotKind::Ugv { (d.x * d.x + d.y * d.y).sqrt() } else { d.norm() };
        d < self.world.scenario.mission.arrive_tolerance
    }

    /// Zone protocol for aerial robots: release zones left behind, request
    /// the zone ahead and hover while told to wait.
    fn zones_allow(&mut self, here: &Vec3, ahead: &Vec3) -> bool {
        if self.robot.cfg.kind != RobotKind::Uav {
            return true;
        }
        let id = self.robot.cfg.id.clone();
        let cur = self.registry.zone_containing(here).map(|z| z.id.clone());
        let want = self.registry.zone_containing(ahead).map(|z| z.id.clone());
        if let Some(h) = self.robot.held_zone.clone() {
            let near = self.registry.zone(&h).is_some_and(|z| Aabb::new(z.min, z.max).expanded(0.3).contains(here));
            if cur.as_ref() != Some(&h) && want.as_ref() != Some(&h) && !near
                && self.registry.release(&id, &h, self.tick).is_ok() {
                    self.robot.held_zone = None;
                }
        }
        for z in [cur, want].into_iter().flatten() {
            if self.robot.held_zone.as_ref() == Some(&z) {
                continue;
            }
            if self.robot.held_zone.is_some() {
                continue;
            }
            match self.registry.request_enter(&id, &z, self.tick) {
                Ok(Grant::Granted) => self.robot.held_zone = Some(z),
                Ok(Grant::Wait) => return false,
                Err(e) => {
                    log::warn!("{id}: zone request failed: {e}");
                    return false;
                }
            }
        }
        true
    }

    fn nav_poll(&mut self) -> NavStatus {
        let Some(mut nav) = self.robot.memory.nav.take() else { return NavStatus::Arrived };
        let est = self.robot.estimated_pose();
        let p = est.position();
        if self.arrived(&p, &nav.goal) {
            return NavStatus::Arrived;
        }
        if self.robot.live_dirty {
            self.robot.live_dirty = false;
            let stamped = self.live_grid();
            let here = match nearest_free(&stamped, &p, 1.0) {
                Some(h) => h,
                None => return NavStatus::Failed("boxed in by new obstacles".into()),
            };
            let rest = Path::from_waypoints(nav.pursuit.remaining(&p));
            match validate_and_replan(&rest, &self.robot.live_points, &here, &self.robot.grid) {
                Ok(ReplanOutcome::Unchanged) => {}
                Ok(ReplanOutcome::Replanned(path)) => {
                    self.event("replan", &format!("{:.2} m", path.total_length));
                    nav.pursuit = Pursuit::new(path.waypoints);
                }
                Err(e) => return NavStatus::Failed(e.to_string()),
            }
        }
        let carrot = nav.pursuit.carrot(&p, 1.0);
        let ahead = nav.pursuit.carrot(&p, 2.0);
        if !self.zones_allow(&p, &ahead) {
            self.robot.memory.nav = Some(nav);
            return NavStatus::Waiting;
        }
        let lim = self.robot.cfg.limits;
        let mut cmd = pursue(&est, &carrot, &nav.goal, &lim, 1.0);
        if nav.face_hull {
            let target = self.world.hull.clamp(&p);
            if ((target - p).xy()).norm() > 0.1 {
                cmd.yaw_rate = face(&est, &target, &lim).0.yaw_rate;
            }
        }
        self.robot.cmd = cmd;
        self.robot.memory.nav = Some(nav);
        NavStatus::Moving
    }

    fn explore_poll(&mut self) -> TaskState {
        loop {
            if self.robot.memory.nav.is_none() {
                let m = &self.robot.memory;
                if m.next >= m.queue.len() {
                    return TaskState::Finished(Status::Success);
                }
                let goal = m.queue[m.next];
                let face = m.face_flags.get(m.next).copied().unwrap_or(false);
                if let Err(e) = self.start_nav(&goal, face) {
                    self.event("waypoint_skipped", &e);
                    self.robot.memory.next += 1;
                    continue;
                }
            }
            match self.nav_poll() {
                NavStatus::Moving | NavStatus::Waiting => return TaskState::Running,
                NavStatus::Arrived => {
                    self.robot.memory.nav = None;
                    self.robot.memory.next += 1;
                }
                NavStatus::Failed(e) => {
                    self.event("waypoint_skipped", &e);
                    self.robot.memory.nav = None;
                    self.robot.memory.next += 1;
                }
            }
        }
    }

    /// Thermal frame from the true camera, tagged with the estimated pose.
    fn thermal_view(&self) -> ThermalImage {
        let s = &self.world.scenario;
        let est = self.robot.estimated_pose();
        let spots: Vec<FireSpot> = self
            .fires
            .iter()
            .filter(|f| f.extinguished.is_none())
            .map(|f| FireSpot { position: f.spec.position, temperature: f.spec.temperature, radius: f.spec.radius })
            .collect();
        synth_thermal(
            &self.camera(&self.robot.truth),
            &self.camera(&est),
            &s.camera,
            &spots,
            &self.world.truth_map,
            FIRE_MARGIN,
        )
    }

    fn detect_poll(&mut self, bb: &mut Blackboard) -> TaskState {
        let s = &self.world.scenario;
        let est = self.robot.estimated_pose();
        let img = self.thermal_view();
        let dets = segment_fire(&img, s.fire.threshold, s.fire.min_pixels);
        if !dets.is_empty() {
            let body = match &self.robot.cloud {
                Some(c) => c.clone(),
                None => {
                    let mut rng = substream(s.seed, Stream::FireLidar, self.robot.index, self.tick);
                    synth_lidar(&self.robot.truth, &self.world.truth_map, &s.lidar, s.noise.lidar, &mut rng)
                }
            };
            let cloud: Vec<Vec3> = body.iter().map(|p| est.body_to_map(p)).collect();
            let cov = self.robot.mcl.estimate().covariance;
            let loc: Matrix3<f64> = cov.fixed_view::<3, 3>(0, 0).into_owned();
            for d in &dets {
                let ray = pixel_to_ray(d.u, d.v, &img.intrinsics, &img.pose);
                let assoc = associate_range(&ray, &cloud, &self.world.known_map, &s.fire);
                let m = FireMeasurement::new(&ray, &assoc, s.fire.sigma_bearing, &loc);
                let known = self.robot.tracker.fires().len();
                match self.robot.tracker.ingest(&m, self.tick) {
                    Ok(id) if self.robot.tracker.fires().len() > known => {
                        self.event("fire_track", &format!("{id} {}", assoc.source.name()));
                    }
                    Ok(_) => {}
                    Err(e) => log::debug!("{}: measurement rejected: {e}", self.robot.cfg.id),
                }
            }
        }
        let confirm = s.mission.confirm as usize;
        let pick = self
            .robot
            .tracker
            .fires()
            .iter()
            .filter(|f| f.belief.measurement_count >= confirm && !self.robot.memory.engaged.contains(&f.id))
            .filter_map(|f| Some((f, f.estimate()?, f.belief.covariance()?)))
            .filter(|(_, mu, cov)| cov.trace() <= 1.0 && self.robot.region.contains(mu))
            .max_by(|a, b| a.0.belief.measurement_count.cmp(&b.0.belief.measurement_count).then(b.0.id.cmp(&a.0.id)))
            .map(|(f, mu, _)| (f.id, mu));
        match pick {
            Some((id, mu)) => {
                self.robot.memory.engaged.insert(id);
                bb.set("fire_target", Value::Point(mu));
                bb.set("fire_id", Value::Int(id as i64));
                self.event("fire_confirmed", &format!("{id} at {:.2} {:.2} {:.2}", mu.x, mu.y, mu.z));
                TaskState::Finished(Status::Success)
            }
            None => TaskState::Running,
        }
    }

    fn vantage_points(&self, target: &Vec3) -> Vec<Vec3> {
        let r0 = self.world.scenario.mission.attack_range;
        let uav = self.robot.cfg.kind == RobotKind::Uav;
        let heights: Vec<f64> = if uav {
            let base = target.z.max(1.0);
            vec![base, base + 1.0, base + 2.0]
        } else {
            vec![self.robot.cfg.start.z]
        };
        let here = self.robot.estimated_pose().position();
        let grid = self.live_grid();
        let mut out: Vec<(f64, usize, Vec3)> = Vec::new();
        for (hi, z) in heights.iter().enumerate() {
            for radius in [0.5 * r0, 0.7 * r0] {
                for k in 0..16 {
                    let a = std::f64::consts::PI * k as f64 / 8.0;
                    let c = Vec3::new(target.x + radius * a.cos(), target.y + radius * a.sin(), *z);
                    let c = grid.project(&c);
                    if grid.free_cell(&c).is_none() || !visible(&c, target, &self.world.known_map, FIRE_MARGIN) {
                        continue;
                    }
                    // Inner ring first unless it is much farther away.
                    let cost = (c - here).norm() + if radius > 0.5 * r0 { 2.0 } else { 0.0 };
                    out.push((cost, hi * 100 + k, c));
                }
            }
        }
        out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        out.into_iter().map(|(_, _, c)| c).collect()
    }

    fn approach_start(&mut self, bb: &Blackboard) -> TaskState {
        let Some(target) = bb.get_point("fire_target") else { return TaskState::Finished(Status::Failure) };
        for c in self.vantage_points(&target).into_iter().take(6) {
            if self.start_nav(&c, false).is_ok() {
                return self.nav_task_poll();
            }
        }
        self.event("no_vantage", &format!("{:.2} {:.2} {:.2}", target.x, target.y, target.z));
        TaskState::Finished(Status::Failure)
    }

    fn nav_task_poll(&mut self) -> TaskState {
        match self.nav_poll() {
            NavStatus::Moving | NavStatus::Waiting => TaskState::Running,
            NavStatus::Arrived => {
                self.robot.memory.nav = None;
                TaskState::Finished(Status::Success)
            }
            NavStatus::Failed(e) => {
                self.event("nav_failed", &e);
                self.robot.memory.nav = None;
                TaskState::Finished(Status::Failure)
            }
        }
    }

    /// Point on the camera ray of the hot spot nearest `target`, if one is in
    /// view within 1.5 m of it.
    fn sighted(&self, target: &Vec3) -> Option<Vec3> {
        let s = &self.world.scenario;
        let img = self.thermal_view();
        segment_fire(&img, s.fire.threshold, s.fire.min_pixels)
            .iter()
            .map(|d| {
                let ray = pixel_to_ray(d.u, d.v, &img.intrinsics, &img.pose);
                let t = (target - ray.origin).dot(&ray.direction).max(0.0);
                let p = ray.point_at(t);
                ((p - target).norm(), p)
            })
            .filter(|(miss, _)| *miss <= 1.5)
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|(_, p)| p)
    }

    fn extinguish_poll(&mut self, bb: &mut Blackboard) -> TaskState {
        let s = &self.world.scenario;
        let Some(target) = bb.get_point("fire_target") else { return TaskState::Finished(Status::Failure) };
        let dwell_ticks = (s.mission.dwell * s.tick_rate).round() as u64;
        let give_up = dwell_ticks + (30.0 * s.tick_rate) as u64;
        self.robot.memory.elapsed += 1;
        let est = self.robot.estimated_pose();
        let lim = self.robot.cfg.limits;
        let aim = self.sighted(&target).unwrap_or(target);
        self.robot.cmd = face(&est, &aim, &lim).0;

        // The agent acts on the physical fire nearest its belief.
        let truth = self.robot.truth;
        let hit = self
            .fires
            .iter()
            .enumerate()
            .filter(|(_, f)| f.extinguished.is_none())
            .map(|(i, f)| (i, (f.spec.position - target).norm()))
            .filter(|(_, d)| *d <= 2.0)
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i);
        let effective = hit.is_some_and(|i| {
            let f = self.fires[i].spec.position;
            let d = f - truth.position();
            d.norm() <= s.mission.attack_range
                && visible(&truth.position(), &f, &self.world.truth_map, FIRE_MARGIN)
                && angle_diff(d.y.atan2(d.x), truth.yaw).abs() <= s.mission.aim_tolerance
        });
        self.robot.memory.dwell = if effective { self.robot.memory.dwell + 1 } else { 0 };
        if let (true, Some(i)) = (self.robot.memory.dwell >= dwell_ticks, hit) {
            let id = self.robot.cfg.id.clone();
            self.fires[i].extinguished = Some((self.tick, id));
            self.robot.inventory = self.robot.inventory.saturating_sub(1);
            let fid = self.fires[i].spec.id.clone();
            self.event("extinguished", &fid);
            bb.remove("fire_target");
            return TaskState::Finished(Status::Success);
        }
        if self.robot.memory.elapsed > give_up {
            self.event("extinguish_failed", &format!("{:.2} {:.2} {:.2}", target.x, target.y, target.z));
            return TaskState::Finished(Status::Failure);
        }
        TaskState::Running
    }

    fn dispatch(&mut self, task: &str, args: &[String], bb: &mut Blackboard, first: bool) -> TaskState {
        match task {
            "explore" => {
                if first {
                    let wps: Option<Vec<Vec3>> = args.iter().map(|a| parse_vec3(a)).collect();
                    let Some(wps) = wps else { return TaskState::Finished(Status::Failure) };
                    let m = &mut self.robot.memory;
                    m.queue = wps;
                    m.next = 0;
                    m.nav = None;
                }
                self.explore_poll()
            }
            "detect_fire" => self.detect_poll(bb),
            "check_fire_found" => TaskState::Finished(if bb.get_point("fire_target").is_some() {
                Status::Success
            } else {
                Status::Failure
            }),
            "approach_fire" => {
                if first {
                    self.robot.memory.nav = None;
                    self.approach_start(bb)
                } else {
                    self.nav_task_poll()
                }
            }
            "extinguish" => {
                if first {
                    if self.robot.inventory == 0 {
                        return TaskState::Finished(Status::Failure);
                    }
                    self.robot.memory.dwell = 0;
                    self.robot.memory.elapsed = 0;
                }
                self.extinguish_poll(bb)
            }
            "go_home" => {
                if first {
                    let Some(home) = args.first().and_then(|a| parse_vec3(a)) else {
                        return TaskState::Finished(Status::Failure);
                    };
                    if let Err(e) = self.start_nav(&home, false) {
                        self.event("nav_failed", &e);
                        return TaskState::Finished(Status::Failure);
                    }
                }
                self.nav_task_poll()
            }
            other => {
                log::warn!("unknown task `{other}`");
                TaskState::Finished(Status::Failure)
            }
        }
    }
}

impl TaskRuntime for TaskCtx<'_> {
    fn start(&mut self, _node: usize, task: &str, args: &[String], bb: &mut Blackboard) -> TaskState {
        self.dispatch(task, args, bb, true)
    }

    fn poll(&mut self, _node: usize, task: &str, args: &[String], bb: &mut Blackboard) -> TaskState {
        self.dispatch(task, args, bb, false)
    }

    fn cancel(&mut self, _node: usize, task: &str, _bb: &mut Blackboard) {
        if matches!(task, "explore" | "approach_fire" | "go_home") {
            self.robot.memory.nav = None;
        }
    }
}
