use super::building::generate_building;
use super::kinematics::{scripted_step, step, Command};
use super::report::{compute_report, RunReport};
use super::rng::{substream, Stream};
use super::scenario::{MissionMode, RobotConfig, Scenario};
use super::sensors::{synth_altimeter, synth_gps, synth_imu, synth_lidar, synth_odometry};
use super::tasks::{self, Region, TaskCtx, TaskMemory};
use super::{Aabb, SimError};
use crate::coordination::{assign_tasks, RobotKind, RobotSpec, ZoneRegistry, COORD_HEADER};
use crate::executive::{build_fire_mission_tree, BehaviorTree, Blackboard, Status, EVENT_HEADER};
use crate::fire::{fuse_tracks, write_fire_report, FireTracker, TrackedFire};
use crate::geometry::{Pose, Vec3};
use crate::mcl::{Mcl, OdomDelta, SensorFrame, TraceRow, TRACE_HEADER};
use crate::planner::{PlanMode, PlanningGrid};
use crate::world_model::{
    build_likelihood_grid, nearest_occupied_distance_field, read_map_file, Cell, DistanceField, VoxelGrid,
};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// Read-only world shared by every robot during a tick.
pub(crate) struct World {
    pub scenario: Scenario,
    pub truth_map: VoxelGrid,
    pub known_map: Arc<VoxelGrid>,
    pub known_field: DistanceField,
    pub gps_denied: Vec<Aabb>,
    pub hull: Aabb,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct FireTruth {
    pub spec: super::FireSpec,
    pub extinguished: Option<(u64, String)>,
}

/// Per-tick records kept for one robot.
#[derive(Debug, Clone, Default)]
pub struct RobotHistory {
    pub truth: Vec<Pose>,
    pub trace: Vec<TraceRow>,
}

pub(crate) struct RobotState {
    pub cfg: RobotConfig,
    pub index: u64,
    pub truth: Pose,
    pub prev_truth: Pose,
    pub mcl: Mcl,
    pub grid: Arc<PlanningGrid>,
    pub tree: Option<BehaviorTree>,
    pub bb: Blackboard,
    pub finished: Option<Status>,
    pub tracker: FireTracker,
    pub cmd: Command,
    /// Body-frame cloud synthesized this tick, if any.
    pub cloud: Option<Vec<Vec3>>,
    pub imu: (f64, f64, f64),
    pub live_cells: BTreeSet<Cell>,
    pub live_points: Vec<Vec3>,
    pub live_dirty: bool,
    pub held_zone: Option<String>,
    pub inventory: u32,
    pub region: Region,
    pub memory: TaskMemory,
    pub script_next: usize,
    pub history: RobotHistory,
    pub bt_log: Vec<String>,
}

impl RobotState {
    /// Pose the robot believes it has.
    pub fn estimated_pose(&self) -> Pose {
        self.mcl.estimate().pose(self.imu.0, self.imu.1)
    }
}

/// Stepping simulator. Construct from a validated scenario; each [`tick`]
/// runs sensing, localization, the executive and motion for every robot.
///
/// [`tick`]: Simulation::tick
pub struct Simulation {
    pub(crate) world: World,
    pub(crate) robots: Vec<RobotState>,
    pub(crate) fires: Vec<FireTruth>,
    pub(crate) registry: ZoneRegistry,
    tick: u64,
    coord_log: Vec<String>,
    events: Vec<String>,
}

fn planning_grid(
    cache: &mut BTreeMap<(bool, u64, u64), Arc<PlanningGrid>>,
    map: &VoxelGrid,
    cfg: &RobotConfig,
) -> Result<Arc<PlanningGrid>, SimError> {
    let two_d = cfg.kind == RobotKind::Ugv;
    let key = (two_d, cfg.inflation.to_bits(), if two_d { cfg.start.z.to_bits() } else { 0 });
    if let Some(g) = cache.get(&key) {
        return Ok(g.clone());
    }
    let mode = if two_d { PlanMode::TwoD } else { PlanMode::ThreeD };
    let g = Arc::new(PlanningGrid::new(map, cfg.inflation, mode, cfg.start.z)?);
    cache.insert(key, g.clone());
    Ok(g)
}

impl Simulation {
    pub fn new(scenario: &Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        let s = scenario.clone();
        let known = match &s.map_file {
            Some(p) => read_map_file(p)?,
            None => generate_building(&s.building)?,
        };
        let mut truth_map = known.clone();
        for b in &s.obstacles {
            truth_map.fill_box(b.min, b.max, true);
        }
        let hull = s.building.hull();
        let likelihood = Arc::new(build_likelihood_grid(&known, s.sigma_hit, s.truncation)?);
        let known_field = nearest_occupied_distance_field(&known)?;

        let mut registry = ZoneRegistry::new();
        for z in &s.zones {
            registry.add_zone(z.clone())?;
        }
        let fleet: Vec<RobotSpec> = s
            .robots
            .iter()
            .filter(|r| r.mode == MissionMode::Fire)
            .map(|r| RobotSpec { id: r.id.clone(), kind: r.kind, priority: r.priority })
            .collect();
        let alloc = assign_tasks(s.building.floors, &fleet);

        let mut grids = BTreeMap::new();
        let mut robots = Vec::new();
        let timeout = (s.mission.timeout * s.tick_rate).round() as u64;
        for (i, cfg) in s.robots.iter().enumerate() {
            registry.register(&cfg.id, cfg.kind, cfg.priority, cfg.altitude_band)?;
            let mut rng = substream(s.seed, Stream::FilterInit, i as u64, 0);
            let mcl = Mcl::new(cfg.mcl.clone(), likelihood.clone(), &cfg.start, cfg.init_spread, &mut rng)?;
            let grid = planning_grid(&mut grids, &known, cfg)?;
            let assigned = alloc.tasks.get(&cfg.id).cloned().unwrap_or_default();
            let plan = tasks::role_plan(&s, cfg, &assigned);
            let face_flags = if cfg.waypoints.is_some() { Vec::new() } else { plan.face_hull.clone() };
            let tree = match cfg.mode {
                MissionMode::Fire => {
                    let wps = cfg.waypoints.clone().unwrap_or_else(|| plan.waypoints.clone());
                    if wps.is_empty() {
                        None
                    } else {
                        Some(BehaviorTree::new(build_fire_mission_tree(&plan.role, &wps, &cfg.home, timeout)?)?)
                    }
                }
                _ => None,
            };
            robots.push(RobotState {
                cfg: cfg.clone(),
                index: i as u64,
                truth: cfg.start,
                prev_truth: cfg.start,
                mcl,
                grid,
                tree,
                bb: Blackboard::default(),
                finished: None,
                tracker: FireTracker::new(s.fire.gate),
                cmd: Command::default(),
                cloud: None,
                imu: (0.0, 0.0, cfg.start.yaw),
                live_cells: BTreeSet::new(),
                live_points: Vec::new(),
                live_dirty: false,
                held_zone: None,
                inventory: 1,
                region: plan.region,
                memory: TaskMemory::with_face_flags(face_flags),
                script_next: 0,
                history: RobotHistory::default(),
                bt_log: Vec::new(),
            });
        }
        let mut events = Vec::new();
        for r in &robots {
            let task = alloc.tasks.get(&r.cfg.id).map(|t| format!("{t:?}")).unwrap_or_else(|| "none".into());
            events.push(format!("0,{},assigned,{}", r.cfg.id, task.replace(',', ";")));
        }
        for t in &alloc.unassigned {
            events.push(format!("0,world,unassigned,{t:?}"));
        }
        let fires: Vec<FireTruth> = s.fires.iter().map(|f| FireTruth { spec: f.clone(), extinguished: None }).collect();
        for f in &fires {
            events.push(format!("0,world,fire_active,{}:{}", f.spec.id, f.spec.kind.name()));
        }
        let world = World {
            gps_denied: vec![hull],
            hull,
            truth_map,
            known_map: Arc::new(known),
            known_field,
            scenario: s,
        };
        Ok(Self { world, robots, fires, registry, tick: 0, coord_log: Vec::new(), events })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.world.scenario
    }

    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    pub fn history(&self, robot: &str) -> Option<&RobotHistory> {
        self.robots.iter().find(|r| r.cfg.id == robot).map(|r| &r.history)
    }

    pub fn truth_pose(&self, robot: &str) -> Option<Pose> {
        self.robots.iter().find(|r| r.cfg.id == robot).map(|r| r.truth)
    }

    /// Fire ids with the tick they were put out.
    pub fn extinguished(&self) -> Vec<(String, Option<u64>)> {
        self.fires.iter().map(|f| (f.spec.id.clone(), f.extinguished.as_ref().map(|e| e.0))).collect()
    }

    /// Every robot has nothing left to do.
    pub fn is_done(&self) -> bool {
        self.robots.iter().all(|r| match r.cfg.mode {
            MissionMode::Fire => r.finished.is_some() || r.tree.is_none(),
            MissionMode::Scripted => r.script_next >= r.cfg.waypoints.as_ref().map_or(0, Vec::len),
            MissionMode::Idle => true,
        })
    }

    pub fn tick(&mut self) -> Result<(), SimError> {
        let t = self.tick;
        let world = &self.world;
        self.robots.par_iter_mut().try_for_each(|r| sense_and_localize(r, world, t))?;

        for i in 0..self.robots.len() {
            let robot = &mut self.robots[i];
            if robot.cfg.mode == MissionMode::Fire && robot.finished.is_none() {
                if let Some(mut tree) = robot.tree.take() {
                    let mut bb = std::mem::take(&mut robot.bb);
                    let status = {
                        let mut ctx = TaskCtx {
                            robot,
                            world: &self.world,
                            registry: &mut self.registry,
                            fires: &mut self.fires,
                            events: &mut self.events,
                            tick: t,
                        };
                        tree.tick(&mut bb, &mut ctx)
                    };
                    for ev in tree.take_events() {
                        robot.bt_log.push(ev.to_csv());
                    }
                    if status != Status::Running {
                        robot.finished = Some(status);
                        self.events.push(format!("{t},{},mission_done,{}", robot.cfg.id, status.name()));
                    }
                    robot.bb = bb;
                    robot.tree = Some(tree);
                }
            }
            for ev in self.registry.take_events() {
                self.coord_log.push(ev.to_csv());
            }
        }

        let dt = self.world.scenario.dt();
        for r in &mut self.robots {
            r.prev_truth = r.truth;
            r.truth = match r.cfg.mode {
                MissionMode::Scripted => {
                    let wps = r.cfg.waypoints.as_deref().unwrap_or(&[]);
                    match wps.get(r.script_next) {
                        Some(target) => {
                            let p = scripted_step(&r.truth, target, r.cfg.limits.max_speed, &r.cfg.limits, dt);
                            if p.position() == *target {
                                r.script_next += 1;
                            }
                            p
                        }
                        None => r.truth,
                    }
                }
                _ => step(&r.truth, &r.cmd, &r.cfg.limits, dt),
            };
            r.cmd = Command::default();
        }
        self.monitor_zones(t);
        self.tick += 1;
        Ok(())
    }

    /// Flags any UAV whose true position lies in a zone it does not hold,
    /// and UAVs sharing a zone too close in height.
    fn monitor_zones(&mut self, t: u64) {
        let mut inside = Vec::new();
        for r in &self.robots {
            if r.cfg.kind != RobotKind::Uav {
                continue;
            }
            let p = r.truth.position();
            if let Some(z) = self.registry.zone_containing(&p) {
                if r.held_zone.as_deref() != Some(z.id.as_str()) {
                    self.coord_log.push(format!("{t},{},{},intrusion", r.cfg.id, z.id));
                } else {
                    inside.push((r.cfg.id.as_str(), r.cfg.priority, z.id.as_str(), p.z));
                }
            }
        }
        for (id, zone) in too_close(&inside, self.world.scenario.mission.min_separation) {
            self.coord_log.push(format!("{t},{id},{zone},separation"));
        }
    }

    /// Runs until `max_ticks` (default: the scenario duration) or until every
    /// robot is done.
    pub fn run(&mut self, max_ticks: Option<u64>) -> Result<(), SimError> {
        let limit = max_ticks.unwrap_or_else(|| self.world.scenario.ticks());
        while self.tick < limit && !self.is_done() {
            self.tick()?;
        }
        Ok(())
    }

    pub fn team_fires(&self) -> Vec<TrackedFire> {
        let sources: Vec<&[TrackedFire]> = self.robots.iter().map(|r| r.tracker.fires()).collect();
        fuse_tracks(&sources, self.world.scenario.fire.gate)
    }

    /// Writes every log into `dir`.
    pub fn write_logs(&self, dir: &Path) -> Result<(), SimError> {
        std::fs::create_dir_all(dir)?;
        let s = &self.world.scenario;
        let mut meta = file(dir, "meta.csv")?;
        writeln!(meta, "key,value")?;
        writeln!(meta, "scenario,{}", s.name.replace(',', ";"))?;
        writeln!(meta, "seed,{}", s.seed)?;
        writeln!(meta, "tick_rate,{}", s.tick_rate)?;
        writeln!(meta, "ticks,{}", self.tick)?;
        meta.flush()?;

        let mut robots = file(dir, "robots.csv")?;
        writeln!(robots, "id,kind,priority,max_speed")?;
        let mut truth = file(dir, "truth.csv")?;
        writeln!(truth, "tick,robot,x,y,z,roll,pitch,yaw")?;
        for r in &self.robots {
            let kind = if r.cfg.kind == RobotKind::Uav { "uav" } else { "ugv" };
            writeln!(robots, "{},{kind},{},{}", r.cfg.id, r.cfg.priority, r.cfg.limits.max_speed)?;
            let mut mcl = file(dir, &format!("mcl_{}.csv", r.cfg.id))?;
            writeln!(mcl, "{TRACE_HEADER}")?;
            for row in &r.history.trace {
                writeln!(mcl, "{}", row.to_csv())?;
            }
            mcl.flush()?;
            let mut bt = file(dir, &format!("bt_{}.csv", r.cfg.id))?;
            writeln!(bt, "{EVENT_HEADER}")?;
            for l in &r.bt_log {
                writeln!(bt, "{l}")?;
            }
            bt.flush()?;
        }
        for (t, _) in self.robots.first().map(|r| r.history.truth.iter().enumerate()).into_iter().flatten() {
            for r in &self.robots {
                let p = &r.history.truth[t];
                writeln!(truth, "{t},{},{},{},{},{},{},{}", r.cfg.id, p.x, p.y, p.z, p.roll, p.pitch, p.yaw)?;
            }
        }
        robots.flush()?;
        truth.flush()?;

        let mut coord = file(dir, "coordination.csv")?;
        writeln!(coord, "{COORD_HEADER}")?;
        for l in &self.coord_log {
            writeln!(coord, "{l}")?;
        }
        coord.flush()?;
        let mut ev = file(dir, "events.csv")?;
        writeln!(ev, "tick,robot,event,detail")?;
        for l in &self.events {
            writeln!(ev, "{l}")?;
        }
        ev.flush()?;
        let mut fires = file(dir, "fires.csv")?;
        write_fire_report(&self.team_fires(), &mut fires)?;
        fires.flush()?;
        Ok(())
    }
}

fn file(dir: &Path, name: &str) -> Result<std::io::BufWriter<std::fs::File>, SimError> {
    Ok(std::io::BufWriter::new(std::fs::File::create(dir.join(name))?))
}

/// Synthesizes this tick's sensors from ground truth and feeds the filter.
fn sense_and_localize(r: &mut RobotState, world: &World, t: u64) -> Result<(), SimError> {
    let s = &world.scenario;
    let (seed, i) = (s.seed, r.index);
    let odom = if t == 0 {
        OdomDelta::default()
    } else {
        synth_odometry(&r.prev_truth, &r.truth, &s.noise.odom, &mut substream(seed, Stream::Odometry, i, t))
    };
    let pos = r.truth.position();
    let imu = synth_imu(&r.truth, &s.noise.imu, &mut substream(seed, Stream::Imu, i, t));
    let gps = synth_gps(&pos, &world.gps_denied, s.noise.gps, &mut substream(seed, Stream::Gps, i, t));
    let altimeter = (r.cfg.kind == RobotKind::Uav)
        .then(|| synth_altimeter(&pos, 0.0, s.noise.altimeter, &mut substream(seed, Stream::Altimeter, i, t)));
    r.imu = imu;
    r.cloud = None;
    let cloud = if r.mcl.will_update(&odom) {
        let c = synth_lidar(&r.truth, &world.truth_map, &s.lidar, s.noise.lidar, &mut substream(seed, Stream::Lidar, i, t));
        r.cloud = Some(c.clone());
        c
    } else {
        Vec::new()
    };
    let frame = SensorFrame { cloud, gps, imu_roll: imu.0, imu_pitch: imu.1, imu_yaw: imu.2, altimeter };
    let out = r.mcl.process(&odom, &frame, &mut substream(seed, Stream::Filter, i, t))?;
    r.history.truth.push(r.truth);
    r.history.trace.push(r.mcl.trace_row(t, &out));
    if r.cfg.mode == MissionMode::Fire {
        tasks::update_live_obstacles(r, world);
    }
    Ok(())
}

/// Builds the simulation, runs it, writes logs into `out` and returns the
/// report recomputed from those logs.
pub fn run_scenario(scenario: &Scenario, out: &Path, max_ticks: Option<u64>) -> Result<RunReport, SimError> {
    let started = std::time::Instant::now();
    let mut sim = Simulation::new(scenario)?;
    sim.run(max_ticks)?;
    sim.write_logs(out)?;
    let mut report = compute_report(out)?;
    report.wall_clock_s = Some(started.elapsed().as_secs_f64());
    let json = serde_json::to_string_pretty(&report).map_err(std::io::Error::other)?;
    std::fs::write(out.join("report.json"), json + "\n")?;
    Ok(report)
}

/// Pairs of UAVs inside the same zone less than `min_sep` apart in height,
/// reported by the lower-priority member. Entries are
/// `(id, priority, zone, z)`.
fn too_close<'a>(inside: &[(&'a str, u32, &'a str, f64)], min_sep: f64) -> Vec<(&'a str, &'a str)> {
    let mut out = Vec::new();
    for (i, a) in inside.iter().enumerate() {
        for b in &inside[i + 1..] {
            if a.2 == b.2 && (a.3 - b.3).abs() < min_sep {
                out.push(if a.1 > b.1 { (a.0, a.2) } else { (b.0, b.2) });
            }
        }
    }
    out
}
