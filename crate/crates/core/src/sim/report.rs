use super::SimError;
use crate::geometry::angle_diff;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotReport {
    pub id: String,
    pub kind: String,
    pub position_rmse: f64,
    pub yaw_rmse_deg: f64,
    pub path_length: f64,
    pub max_speed: f64,
    pub speed_violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FireOutcome {
    pub id: String,
    pub kind: String,
    pub extinguished_tick: Option<u64>,
    pub extinguished_s: Option<f64>,
    pub by: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub seed: u64,
    pub ticks: u64,
    pub robots: Vec<RobotReport>,
    pub fires_total: usize,
    pub fires_extinguished: usize,
    pub fires: Vec<FireOutcome>,
    pub coordination_violations: u64,
    /// Not derivable from logs; filled in by the runner.
    pub wall_clock_s: Option<f64>,
}

impl RunReport {
    pub fn all_fires_out(&self) -> bool {
        self.fires_extinguished == self.fires_total
    }
}

struct Csv {
    name: String,
    rows: Vec<Vec<String>>,
}

impl Csv {
    fn read(dir: &Path, name: &str, header: &str) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(dir.join(name))?;
        let mut lines = text.lines();
        if lines.next() != Some(header) {
            return Err(SimError::Log { file: name.into(), msg: format!("expected header `{header}`") });
        }
        let width = header.split(',').count();
        let mut rows = Vec::new();
        for (i, l) in lines.enumerate() {
            let r: Vec<String> = l.split(',').map(str::to_string).collect();
            if r.len() != width {
                return Err(SimError::Log { file: name.into(), msg: format!("line {} has {} fields", i + 2, r.len()) });
            }
            rows.push(r);
        }
        Ok(Self { name: name.into(), rows })
    }

    fn num<T: std::str::FromStr>(&self, row: usize, col: usize) -> Result<T, SimError> {
        self.rows[row][col]
            .parse()
            .map_err(|_| SimError::Log { file: self.name.clone(), msg: format!("bad value `{}`", self.rows[row][col]) })
    }
}

/// Recomputes the run report from the log files in `dir`.
pub fn compute_report(dir: &Path) -> Result<RunReport, SimError> {
    let meta = Csv::read(dir, "meta.csv", "key,value")?;
    let get = |k: &str| meta.rows.iter().position(|r| r[0] == k);
    let missing = |k: &str| SimError::Log { file: "meta.csv".into(), msg: format!("missing `{k}`") };
    let scenario = meta.rows[get("scenario").ok_or_else(|| missing("scenario"))?][1].clone();
    let seed: u64 = meta.num(get("seed").ok_or_else(|| missing("seed"))?, 1)?;
    let rate: f64 = meta.num(get("tick_rate").ok_or_else(|| missing("tick_rate"))?, 1)?;
    let ticks: u64 = meta.num(get("ticks").ok_or_else(|| missing("ticks"))?, 1)?;

    let robots_csv = Csv::read(dir, "robots.csv", "id,kind,priority,max_speed")?;
    let truth = Csv::read(dir, "truth.csv", "tick,robot,x,y,z,roll,pitch,yaw")?;
    let mut truth_by: BTreeMap<String, Vec<(u64, [f64; 4])>> = BTreeMap::new();
    for i in 0..truth.rows.len() {
        let row = [truth.num(i, 2)?, truth.num(i, 3)?, truth.num(i, 4)?, truth.num(i, 7)?];
        truth_by.entry(truth.rows[i][1].clone()).or_default().push((truth.num(i, 0)?, row));
    }

    let mut priorities = BTreeMap::new();
    let mut robots = Vec::new();
    for i in 0..robots_csv.rows.len() {
        let id = robots_csv.rows[i][0].clone();
        let kind = robots_csv.rows[i][1].clone();
        let prio: u32 = robots_csv.num(i, 2)?;
        let vmax: f64 = robots_csv.num(i, 3)?;
        priorities.insert(id.clone(), (kind.clone(), prio));
        let tr = truth_by.remove(&id).unwrap_or_default();
        let mcl = Csv::read(dir, &format!("mcl_{id}.csv"), crate::mcl::TRACE_HEADER)?;
        let mut est = BTreeMap::new();
        for j in 0..mcl.rows.len() {
            let t: u64 = mcl.num(j, 0)?;
            est.insert(t, [mcl.num::<f64>(j, 1)?, mcl.num(j, 2)?, mcl.num(j, 3)?, mcl.num(j, 4)?]);
        }
        let (mut se_p, mut se_y, mut n) = (0.0, 0.0, 0usize);
        for (t, p) in &tr {
            if let Some(e) = est.get(t) {
                se_p += (e[0] - p[0]).powi(2) + (e[1] - p[1]).powi(2) + (e[2] - p[2]).powi(2);
                se_y += angle_diff(e[3], p[3]).powi(2);
                n += 1;
            }
        }
        let (mut length, mut max_speed, mut violations) = (0.0, 0.0f64, 0u64);
        for w in tr.windows(2) {
            let d = ((w[1].1[0] - w[0].1[0]).powi(2) + (w[1].1[1] - w[0].1[1]).powi(2) + (w[1].1[2] - w[0].1[2]).powi(2)).sqrt();
            length += d;
            let v = d * rate;
            max_speed = max_speed.max(v);
            if v > vmax + 1e-9 {
                violations += 1;
            }
        }
        let nf = n.max(1) as f64;
        robots.push(RobotReport {
            id,
            kind,
            position_rmse: (se_p / nf).sqrt(),
            yaw_rmse_deg: (se_y / nf).sqrt().to_degrees(),
            path_length: length,
            max_speed,
            speed_violations: violations,
        });
    }

    let events = Csv::read(dir, "events.csv", "tick,robot,event,detail")?;
    let mut fires: Vec<FireOutcome> = Vec::new();
    for i in 0..events.rows.len() {
        let r = &events.rows[i];
        match r[2].as_str() {
            "fire_active" => {
                let (id, kind) = r[3].split_once(':').unwrap_or((&r[3], ""));
                fires.push(FireOutcome { id: id.into(), kind: kind.into(), extinguished_tick: None, extinguished_s: None, by: None });
            }
            "extinguished" => {
                let t: u64 = events.num(i, 0)?;
                if let Some(f) = fires.iter_mut().find(|f| f.id == r[3] && f.extinguished_tick.is_none()) {
                    f.extinguished_tick = Some(t);
                    f.extinguished_s = Some(t as f64 / rate);
                    f.by = Some(r[1].clone());
                }
            }
            _ => {}
        }
    }

    let coord = Csv::read(dir, "coordination.csv", crate::coordination::COORD_HEADER)?;
    let coordination_violations = replay_coordination(&coord, &priorities);

    Ok(RunReport {
        scenario,
        seed,
        ticks,
        robots,
        fires_total: fires.len(),
        fires_extinguished: fires.iter().filter(|f| f.extinguished_tick.is_some()).count(),
        fires,
        coordination_violations,
        wall_clock_s: None,
    })
}

/// Counts grants that break the priority rule, double holds, releases of
/// zones not held, monitor intrusions and height-separation breaches.
fn replay_coordination(coord: &Csv, priorities: &BTreeMap<String, (String, u32)>) -> u64 {
    let mut holds: BTreeMap<String, String> = BTreeMap::new();
    let mut occupants: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut bad = 0;
    let uav = |id: &str| priorities.get(id).filter(|(k, _)| k == "uav").map(|(_, p)| *p);
    for r in &coord.rows {
        let (robot, zone) = (r[1].clone(), r[2].clone());
        match r[3].as_str() {
            "grant" => {
                if holds.contains_key(&robot) {
                    bad += 1;
                }
                if let Some(p) = uav(&robot) {
                    let blocked = occupants
                        .get(&zone)
                        .is_some_and(|o| o.iter().any(|other| uav(other).is_some_and(|q| q < p)));
                    if blocked {
                        bad += 1;
                    }
                }
                holds.insert(robot.clone(), zone.clone());
                occupants.entry(zone).or_default().insert(robot);
            }
            "release" => {
                if holds.get(&robot) != Some(&zone) {
                    bad += 1;
                }
                holds.remove(&robot);
                if let Some(o) = occupants.get_mut(&zone) {
                    o.remove(&robot);
                }
            }
            "intrusion" | "separation" => bad += 1,
            _ => {}
        }
    }
    bad
}
