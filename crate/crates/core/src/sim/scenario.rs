//! Scenario files: one `section.key = value` per line, `#` comments.
//!
//! ```text
//! scenario.name = demo          scenario.seed = 7
//! scenario.tick_rate = 10       scenario.duration = 300      # seconds
//! map.origin = 0,0,-0.25        map.size = 40,34,9.25        map.resolution = 0.25
//! map.file = arena.map          # optional, replaces the generated geometry
//! building.floors = 2           building.floor_height = 3    building.wall = 0.25
//! building.min = 12,9           building.max = 28,25
//! building.windows_per_side = 2 building.window = 1,1        building.window_sill = 1
//! building.door.<name> = west,17,1.5,2.25       # side, center, width, height
//! object.<name>.min / .max      # known solid boxes
//! obstacle.<name>.min / .max    # boxes the robots' map does not contain
//! noise.lidar noise.gps noise.odom noise.odom_drift noise.imu_rp noise.imu_yaw
//! noise.imu_yaw_bias noise.altimeter
//! lidar.channels lidar.vfov lidar.horizontal lidar.max_range
//! camera.width camera.height camera.hfov
//! mcl.sigma_hit mcl.truncation
//! mission.timeout mission.attack_range mission.dwell mission.standoff
//! mission.confirm mission.aim_tolerance mission.arrive_tolerance mission.min_separation
//! robot.<id>.type = uav|ugv     robot.<id>.start = x,y,z,yaw
//! robot.<id>.priority .home .mission (fire|scripted|idle) .waypoints (x,y,z;...)
//! robot.<id>.particles .alpha .weighting (fused|map|gps) .sigma_gps
//! robot.<id>.motion_noise (kx,ky,kz,kyaw) .init_spread (x,y,z,yaw)
//! robot.<id>.max_speed .max_yaw_rate .inflation .camera_pitch .band (zmin,zmax)
//! fire.<id>.position .temperature .radius .kind (indoor|facade|outdoor)
//! zone.<id>.min .max .overlap
//! ```
//!
//! Angles (yaw, fields of view, camera pitch, aim tolerance) are in degrees;
//! times are in seconds. Unknown keys are errors.

use super::building::{BuildingParams, Opening, Side};
use super::kinematics::MotionLimits;
use super::sensors::{BeamPattern, ImuNoise, OdomNoise};
use super::thermal::ThermalCamera;
use super::{Aabb, SimError};
use crate::coordination::{RobotKind, Zone};
use crate::fire::FireConfig;
use crate::geometry::{parse_floats, Pose, Vec3};
use crate::mcl::{MclConfig, Weighting};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissionMode {
    /// Behavior-tree fire mission.
    Fire,
    /// Follows its waypoints on ground truth, once.
    Scripted,
    Idle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotConfig {
    pub id: String,
    pub kind: RobotKind,
    pub start: Pose,
    pub home: Vec3,
    pub priority: u32,
    pub mode: MissionMode,
    pub waypoints: Option<Vec<Vec3>>,
    pub mcl: MclConfig,
    pub init_spread: [f64; 4],
    pub limits: MotionLimits,
    pub inflation: f64,
    pub camera_pitch: f64,
    pub altitude_band: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FireKind {
    Indoor,
    Facade,
    Outdoor,
}

impl FireKind {
    pub fn name(self) -> &'static str {
        match self {
            FireKind::Indoor => "indoor",
            FireKind::Facade => "facade",
            FireKind::Outdoor => "outdoor",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "indoor" => Some(FireKind::Indoor),
            "facade" => Some(FireKind::Facade),
            "outdoor" | "ground-outdoor" => Some(FireKind::Outdoor),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FireSpec {
    pub id: String,
    pub kind: FireKind,
    pub position: Vec3,
    pub temperature: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub lidar: f64,
    pub gps: f64,
    pub odom: OdomNoise,
    pub imu: ImuNoise,
    pub altimeter: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            lidar: 0.03,
            gps: 1.0,
            odom: OdomNoise { proportional: 0.05, drift: 0.0 },
            imu: ImuNoise { roll_pitch_sigma: 0.005, yaw_sigma: 0.01, yaw_bias: 0.0 },
            altimeter: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MissionParams {
    pub timeout: f64,
    pub attack_range: f64,
    pub dwell: f64,
    /// Facade standoff distance for exploration loops.
    pub standoff: f64,
    /// Measurements a track needs before it becomes a target.
    pub confirm: u32,
    pub aim_tolerance: f64,
    pub arrive_tolerance: f64,
    /// Least height difference between two UAVs sharing a zone.
    pub min_separation: f64,
}

impl Default for MissionParams {
    fn default() -> Self {
        Self {
            timeout: 240.0,
            attack_range: 3.0,
            dwell: 3.0,
            standoff: 3.0,
            confirm: 5,
            aim_tolerance: 15f64.to_radians(),
            arrive_tolerance: 0.4,
            min_separation: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub tick_rate: f64,
    pub duration: f64,
    pub map_file: Option<PathBuf>,
    pub building: BuildingParams,
    /// Present in the world, absent from the robots' map.
    pub obstacles: Vec<Aabb>,
    pub robots: Vec<RobotConfig>,
    pub fires: Vec<FireSpec>,
    pub zones: Vec<Zone>,
    pub noise: NoiseParams,
    pub lidar: BeamPattern,
    pub camera: ThermalCamera,
    pub fire: FireConfig,
    pub mission: MissionParams,
    pub sigma_hit: f64,
    pub truncation: f64,
}

fn cfg_err(line: usize, msg: impl Into<String>) -> SimError {
    SimError::Config { line, msg: msg.into() }
}

/// Key/value store that remembers line numbers and which keys were used.
struct Entries {
    map: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(src: &str) -> Result<Self, SimError> {
        let mut map = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (k, v) = text.split_once('=').ok_or_else(|| cfg_err(line, format!("expected `key = value`, got `{text}`")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.split('.').count() < 2 || k.split('.').any(|p| p.is_empty()) {
                return Err(cfg_err(line, format!("key `{k}` must look like section.key")));
            }
            if map.insert(k.to_string(), (line, v.to_string())).is_some() {
                return Err(cfg_err(line, format!("duplicate key `{k}`")));
            }
        }
        Ok(Self { map })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.map.remove(key)
    }

    fn ids(&self, section: &str) -> BTreeSet<String> {
        let prefix = format!("{section}.");
        self.map
            .keys()
            .filter_map(|k| k.strip_prefix(&prefix))
            .filter_map(|rest| rest.split_once('.').map(|(id, _)| id.to_string()))
            .collect()
    }

    fn parsed<T>(&mut self, key: &str, f: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>, SimError> {
        match self.take(key) {
            None => Ok(None),
            Some((line, v)) => f(&v).map(Some).ok_or_else(|| cfg_err(line, format!("`{key}`: expected {what}, got `{v}`"))),
        }
    }

    fn f64(&mut self, key: &str) -> Result<Option<f64>, SimError> {
        self.parsed(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()), "a number")
    }

    fn u64(&mut self, key: &str) -> Result<Option<u64>, SimError> {
        self.parsed(key, |v| v.parse::<u64>().ok(), "a non-negative integer")
    }

    fn floats(&mut self, key: &str, n: usize) -> Result<Option<Vec<f64>>, SimError> {
        self.parsed(key, |v| parse_floats(v).filter(|x| x.len() == n), &format!("{n} comma-separated numbers"))
    }

    fn vec3(&mut self, key: &str) -> Result<Option<Vec3>, SimError> {
        Ok(self.floats(key, 3)?.map(|v| Vec3::new(v[0], v[1], v[2])))
    }

    fn bool(&mut self, key: &str) -> Result<Option<bool>, SimError> {
        self.parsed(
            key,
            |v| match v {
                "true" | "yes" | "1" => Some(true),
                "false" | "no" | "0" => Some(false),
                _ => None,
            },
            "a boolean",
        )
    }

    fn text(&mut self, key: &str) -> Option<(usize, String)> {
        self.take(key)
    }

    fn finish(self) -> Result<(), SimError> {
        match self.map.iter().min_by_key(|(_, (line, _))| *line) {
            Some((k, (line, _))) => Err(cfg_err(*line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn parse_waypoints(v: &str) -> Option<Vec<Vec3>> {
    v.split(';')
        .map(|p| parse_floats(p).filter(|x| x.len() == 3).map(|x| Vec3::new(x[0], x[1], x[2])))
        .collect::<Option<Vec<_>>>()
        .filter(|w| !w.is_empty())
}

fn parse_door(v: &str) -> Option<Opening> {
    let (side, rest) = v.split_once(',')?;
    let side = Side::parse(side)?;
    let n = parse_floats(rest)?;
    (n.len() == 3).then(|| Opening { side, center: n[0], width: n[1], sill: 0.0, height: n[2] })
}

fn boxes(e: &mut Entries, section: &str) -> Result<Vec<Aabb>, SimError> {
    let mut out = Vec::new();
    for id in e.ids(section) {
        let min = e.vec3(&format!("{section}.{id}.min"))?;
        let max = e.vec3(&format!("{section}.{id}.max"))?;
        match (min, max) {
            (Some(a), Some(b)) if (0..3).all(|k| a[k] < b[k]) => out.push(Aabb::new(a, b)),
            _ => return Err(SimError::Scenario(format!("{section} `{id}` needs min < max"))),
        }
    }
    Ok(out)
}

impl Scenario {
    pub fn parse(src: &str) -> Result<Self, SimError> {
        Self::parse_in(src, None)
    }

    /// Reads a scenario file; a relative `map.file` resolves against the
    /// scenario's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SimError> {
        let path = path.as_ref();
        let src = std::fs::read_to_string(path)?;
        Self::parse_in(&src, path.parent())
    }

    fn parse_in(src: &str, base: Option<&Path>) -> Result<Self, SimError> {
        let mut e = Entries::parse(src)?;
        let noise_d = NoiseParams::default();
        let mission_d = MissionParams::default();
        let lidar_d = BeamPattern::default();
        let cam_d = ThermalCamera::default();

        let name = e.text("scenario.name").map(|(_, v)| v).unwrap_or_else(|| "scenario".into());
        let seed = e.u64("scenario.seed")?.unwrap_or(0);
        let tick_rate = e.f64("scenario.tick_rate")?.unwrap_or(10.0);
        let duration = e.f64("scenario.duration")?.unwrap_or(300.0);
        let map_file = e.text("map.file").map(|(_, v)| {
            let p = PathBuf::from(v);
            match base {
                Some(b) if p.is_relative() => b.join(p),
                _ => p,
            }
        });

        let bd = BuildingParams::default();
        let mut doors = Vec::new();
        for key in e.map.keys().filter(|k| k.starts_with("building.door.")).cloned().collect::<Vec<_>>() {
            let (line, v) = e.take(&key).expect("listed");
            doors.push(parse_door(&v).ok_or_else(|| cfg_err(line, format!("`{key}`: expected side,center,width,height")))?);
        }
        let window = e.floats("building.window", 2)?;
        let fmin = e.floats("building.min", 2)?;
        let fmax = e.floats("building.max", 2)?;
        let building = BuildingParams {
            origin: e.vec3("map.origin")?.unwrap_or(bd.origin),
            extent: e.vec3("map.size")?.unwrap_or(bd.extent),
            resolution: e.f64("map.resolution")?.unwrap_or(bd.resolution),
            footprint_min: fmin.map(|v| [v[0], v[1]]).unwrap_or(bd.footprint_min),
            footprint_max: fmax.map(|v| [v[0], v[1]]).unwrap_or(bd.footprint_max),
            floors: e.u64("building.floors")?.map(|v| v as usize).unwrap_or(bd.floors),
            floor_height: e.f64("building.floor_height")?.unwrap_or(bd.floor_height),
            wall_thickness: e.f64("building.wall")?.unwrap_or(bd.wall_thickness),
            doors,
            windows_per_side: e.u64("building.windows_per_side")?.map(|v| v as usize).unwrap_or(0),
            window_width: window.as_ref().map(|w| w[0]).unwrap_or(bd.window_width),
            window_height: window.as_ref().map(|w| w[1]).unwrap_or(bd.window_height),
            window_sill: e.f64("building.window_sill")?.unwrap_or(bd.window_sill),
            ground: true,
            boxes: boxes(&mut e, "object")?,
            seed,
        };
        let obstacles = boxes(&mut e, "obstacle")?;

        let noise = NoiseParams {
            lidar: e.f64("noise.lidar")?.unwrap_or(noise_d.lidar),
            gps: e.f64("noise.gps")?.unwrap_or(noise_d.gps),
            odom: OdomNoise {
                proportional: e.f64("noise.odom")?.unwrap_or(noise_d.odom.proportional),
                drift: e.f64("noise.odom_drift")?.unwrap_or(noise_d.odom.drift),
            },
            imu: ImuNoise {
                roll_pitch_sigma: e.f64("noise.imu_rp")?.unwrap_or(noise_d.imu.roll_pitch_sigma),
                yaw_sigma: e.f64("noise.imu_yaw")?.unwrap_or(noise_d.imu.yaw_sigma),
                yaw_bias: e.f64("noise.imu_yaw_bias")?.unwrap_or(noise_d.imu.yaw_bias),
            },
            altimeter: e.f64("noise.altimeter")?.unwrap_or(noise_d.altimeter),
        };
        let lidar = BeamPattern {
            channels: e.u64("lidar.channels")?.map(|v| v as usize).unwrap_or(lidar_d.channels),
            vertical_fov: e.f64("lidar.vfov")?.map(f64::to_radians).unwrap_or(lidar_d.vertical_fov),
            horizontal: e.u64("lidar.horizontal")?.map(|v| v as usize).unwrap_or(lidar_d.horizontal),
            min_range: lidar_d.min_range,
            max_range: e.f64("lidar.max_range")?.unwrap_or(lidar_d.max_range),
        };
        let camera = ThermalCamera {
            width: e.u64("camera.width")?.map(|v| v as usize).unwrap_or(cam_d.width),
            height: e.u64("camera.height")?.map(|v| v as usize).unwrap_or(cam_d.height),
            hfov: e.f64("camera.hfov")?.map(f64::to_radians).unwrap_or(cam_d.hfov),
        };
        let mission = MissionParams {
            timeout: e.f64("mission.timeout")?.unwrap_or(mission_d.timeout),
            attack_range: e.f64("mission.attack_range")?.unwrap_or(mission_d.attack_range),
            dwell: e.f64("mission.dwell")?.unwrap_or(mission_d.dwell),
            standoff: e.f64("mission.standoff")?.unwrap_or(mission_d.standoff),
            confirm: e.u64("mission.confirm")?.map(|v| v as u32).unwrap_or(mission_d.confirm),
            aim_tolerance: e.f64("mission.aim_tolerance")?.map(f64::to_radians).unwrap_or(mission_d.aim_tolerance),
            arrive_tolerance: e.f64("mission.arrive_tolerance")?.unwrap_or(mission_d.arrive_tolerance),
            min_separation: e.f64("mission.min_separation")?.unwrap_or(mission_d.min_separation),
        };
        let sigma_hit = e.f64("mcl.sigma_hit")?.unwrap_or(0.2);
        let truncation = e.f64("mcl.truncation")?.unwrap_or(0.6);

        let mut robots = Vec::new();
        for id in e.ids("robot") {
            robots.push(parse_robot(&mut e, &id, &noise)?);
        }
        let mut fires = Vec::new();
        for id in e.ids("fire") {
            let k = |s: &str| format!("fire.{id}.{s}");
            let position = e.vec3(&k("position"))?.ok_or_else(|| SimError::Scenario(format!("fire `{id}` needs a position")))?;
            let kind = match e.text(&k("kind")) {
                Some((line, v)) => FireKind::parse(&v).ok_or_else(|| cfg_err(line, format!("unknown fire kind `{v}`")))?,
                None => return Err(SimError::Scenario(format!("fire `{id}` needs a kind"))),
            };
            fires.push(FireSpec {
                id: id.clone(),
                kind,
                position,
                temperature: e.f64(&k("temperature"))?.unwrap_or(300.0),
                radius: e.f64(&k("radius"))?.unwrap_or(0.5),
            });
        }
        let mut zones = Vec::new();
        for id in e.ids("zone") {
            let k = |s: &str| format!("zone.{id}.{s}");
            let (min, max) = (e.vec3(&k("min"))?, e.vec3(&k("max"))?);
            let (Some(min), Some(max)) = (min, max) else {
                return Err(SimError::Scenario(format!("zone `{id}` needs min and max")));
            };
            let mut z = Zone::new(&id, min, max);
            z.may_overlap = e.bool(&k("overlap"))?.unwrap_or(false);
            zones.push(z);
        }
        e.finish()?;

        let s = Scenario {
            name,
            seed,
            tick_rate,
            duration,
            map_file,
            building,
            obstacles,
            robots,
            fires,
            zones,
            noise,
            lidar,
            camera,
            fire: FireConfig::default(),
            mission,
            sigma_hit,
            truncation,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn ticks(&self) -> u64 {
        (self.duration * self.tick_rate).round() as u64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.tick_rate
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Scenario(m));
        if !(self.tick_rate > 0.0 && self.duration >= 0.0) {
            return bad("tick rate must be positive and duration non-negative".into());
        }
        let noise = [self.noise.lidar, self.noise.gps, self.noise.altimeter, self.noise.odom.proportional];
        if noise.iter().any(|v| *v < 0.0) {
            return bad("noise levels must be non-negative".into());
        }
        if self.lidar.channels == 0 || self.lidar.horizontal == 0 || !(self.lidar.max_range > 0.0) {
            return bad("lidar pattern needs beams and a positive range".into());
        }
        if self.camera.width == 0 || self.camera.height == 0 || !(self.camera.hfov > 0.0 && self.camera.hfov < std::f64::consts::PI) {
            return bad("camera needs a positive size and field of view".into());
        }
        let m = &self.mission;
        if !(m.attack_range > 0.0 && m.dwell >= 0.0 && m.timeout > 0.0 && m.arrive_tolerance > 0.0) {
            return bad("mission parameters must be positive".into());
        }
        let map_box = Aabb::new(self.building.origin, self.building.origin + self.building.extent);
        let hull = self.building.hull();
        for r in &self.robots {
            if !map_box.contains(&r.start.position()) {
                return bad(format!("robot `{}` starts outside the map", r.id));
            }
            if matches!(r.mode, MissionMode::Scripted) && r.waypoints.is_none() {
                return bad(format!("scripted robot `{}` needs waypoints", r.id));
            }
            r.mcl.validate().map_err(|e| SimError::Scenario(format!("robot `{}`: {e}", r.id)))?;
            if r.kind == RobotKind::Uav {
                if let Some(z) = self.zones.iter().find(|z| Aabb::new(z.min, z.max).contains(&r.start.position())) {
                    return bad(format!("UAV `{}` starts inside zone `{}`", r.id, z.id));
                }
            }
        }
        let uav_prios: Vec<u32> = self.robots.iter().filter(|r| r.kind == RobotKind::Uav).map(|r| r.priority).collect();
        if uav_prios.iter().collect::<BTreeSet<_>>().len() != uav_prios.len() {
            return bad("UAV priorities must be distinct".into());
        }
        for f in &self.fires {
            if !map_box.contains(&f.position) {
                return bad(format!("fire `{}` lies outside the map", f.id));
            }
            let inside = hull.contains(&f.position);
            let ok = match f.kind {
                FireKind::Indoor => inside,
                FireKind::Facade => hull.expanded(0.5).contains(&f.position) && !hull.expanded(-0.01).contains(&f.position),
                FireKind::Outdoor => !inside,
            };
            if !ok {
                return bad(format!("fire `{}` does not match its kind `{}`", f.id, f.kind.name()));
            }
            if !(f.radius > 0.0) {
                return bad(format!("fire `{}` needs a positive radius", f.id));
            }
        }
        Ok(())
    }
}

fn parse_robot(e: &mut Entries, id: &str, noise: &NoiseParams) -> Result<RobotConfig, SimError> {
    let k = |s: &str| format!("robot.{id}.{s}");
    let kind = match e.text(&k("type")) {
        Some((_, v)) if v == "uav" => RobotKind::Uav,
        Some((_, v)) if v == "ugv" => RobotKind::Ugv,
        Some((line, v)) => return Err(cfg_err(line, format!("unknown robot type `{v}`"))),
        None => return Err(SimError::Scenario(format!("robot `{id}` needs a type"))),
    };
    let uav = kind == RobotKind::Uav;
    let s = e.floats(&k("start"), 4)?.ok_or_else(|| SimError::Scenario(format!("robot `{id}` needs a start pose")))?;
    let start = Pose::planar(s[0], s[1], s[2], s[3].to_radians());
    let mode = match e.text(&k("mission")) {
        None => MissionMode::Fire,
        Some((_, v)) if v == "fire" => MissionMode::Fire,
        Some((_, v)) if v == "scripted" => MissionMode::Scripted,
        Some((_, v)) if v == "idle" => MissionMode::Idle,
        Some((line, v)) => return Err(cfg_err(line, format!("unknown mission mode `{v}`"))),
    };
    let waypoints = e.parsed(&k("waypoints"), parse_waypoints, "x,y,z;x,y,z;...")?;
    let mut mcl = if uav { MclConfig::uav() } else { MclConfig::ugv() };
    mcl.sigma_gps = noise.gps.max(1e-3);
    if let Some(n) = e.u64(&k("particles"))? {
        mcl.n_particles = n as usize;
    }
    if let Some(a) = e.f64(&k("alpha"))? {
        mcl.alpha = a;
    }
    if let Some(s) = e.f64(&k("sigma_gps"))? {
        mcl.sigma_gps = s;
    }
    if let Some((line, v)) = e.text(&k("weighting")) {
        mcl.weighting = match v.as_str() {
            "fused" => Weighting::Fused,
            "map" => Weighting::MapOnly,
            "gps" => Weighting::GpsOnly,
            _ => return Err(cfg_err(line, format!("unknown weighting `{v}`"))),
        };
    }
    if let Some(m) = e.floats(&k("motion_noise"), 4)? {
        (mcl.k_x, mcl.k_y, mcl.k_z, mcl.k_yaw) = (m[0], m[1], m[2], m[3]);
    }
    let init_spread = e.floats(&k("init_spread"), 4)?.map(|v| [v[0], v[1], v[2], v[3].to_radians()]).unwrap_or([0.2, 0.2, 0.05, 0.03]);
    let mut limits = if uav { MotionLimits::uav() } else { MotionLimits::ugv() };
    if let Some(v) = e.f64(&k("max_speed"))? {
        limits.max_speed = v;
    }
    if let Some(v) = e.f64(&k("max_yaw_rate"))? {
        limits.max_yaw_rate = v.to_radians();
    }
    let band = e.floats(&k("band"), 2)?.map(|b| (b[0], b[1])).unwrap_or((0.0, f64::INFINITY));
    let cfg = RobotConfig {
        id: id.to_string(),
        kind,
        start,
        home: e.vec3(&k("home"))?.unwrap_or(start.position()),
        priority: e.u64(&k("priority"))?.map(|v| v as u32).unwrap_or(if uav { 1 } else { 0 }),
        mode,
        waypoints,
        mcl,
        init_spread,
        limits,
        inflation: e.f64(&k("inflation"))?.unwrap_or(if uav { 0.5 } else { 0.4 }),
        camera_pitch: e.f64(&k("camera_pitch"))?.map(f64::to_radians).unwrap_or(0.0),
        altitude_band: band,
    };
    if !(cfg.limits.max_speed > 0.0) || (!uav && cfg.limits.max_speed > 0.7 + 1e-12) {
        return Err(SimError::Scenario(format!("robot `{id}`: max speed must be positive (ground robots at most 0.7 m/s)")));
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINI: &str = "
        scenario.name = mini
        scenario.seed = 3
        scenario.duration = 2
        robot.a.type = uav
        robot.a.start = 1,1,1.5,90
        robot.a.mission = idle
        fire.f.position = 2,2,0.2
        fire.f.kind = outdoor
    ";

    #[test]
    fn parses_minimal_file() {
        let s = Scenario::parse(MINI).unwrap();
        assert_eq!(s.name, "mini");
        assert_eq!(s.seed, 3);
        assert_eq!(s.ticks(), 20);
        assert_eq!(s.robots.len(), 1);
        assert!((s.robots[0].start.yaw - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        assert_eq!(s.fires[0].kind, FireKind::Outdoor);
    }

    #[test]
    fn unknown_key_reports_line() {
        let src = format!("{MINI}\n        robot.a.colour = red\n");
        match Scenario::parse(&src) {
            Err(SimError::Config { line, msg }) => {
                assert_eq!(line, 11);
                assert!(msg.contains("robot.a.colour"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(Scenario::parse("scenario.seed = x"), Err(SimError::Config { line: 1, .. })));
        assert!(matches!(Scenario::parse("scenario.seed = 1\nscenario.seed = 2"), Err(SimError::Config { line: 2, .. })));
        assert!(matches!(Scenario::parse("just words"), Err(SimError::Config { line: 1, .. })));
    }

    #[test]
    fn entity_checks() {
        let src = MINI.replace("outdoor", "indoor");
        assert!(matches!(Scenario::parse(&src), Err(SimError::Scenario(_))));
        let src = MINI.replace("type = uav", "type = ugv\n robot.a.max_speed = 1.2");
        assert!(Scenario::parse(&src).is_err());
        let src = MINI.replace("mission = idle", "mission = scripted");
        assert!(Scenario::parse(&src).is_err());
    }
}
