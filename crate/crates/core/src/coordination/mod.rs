//! Zone-level deconfliction between UAVs and static role allocation.
//!
//! A UAV may enter a zone unless a UAV of strictly higher priority (lower
//! number) is inside it or already waiting for it. Ground robots are
//! registered for bookkeeping but never block and are never blocked.

mod allocation;
mod delay;

pub use allocation::{assign_tasks, Allocation, RobotSpec, Task};
pub use delay::MessageDelay;

use crate::geometry::Vec3;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::{Arc, Mutex};
use thiserror::Error;

pub const COORD_HEADER: &str = "tick,robot,zone,event";

#[derive(Debug, Error, PartialEq)]
pub enum CoordError {
    #[error("unknown robot `{0}`")]
    UnknownRobot(String),
    #[error("unknown zone `{0}`")]
    UnknownZone(String),
    #[error("robot `{0}` is already registered")]
    DuplicateRobot(String),
    #[error("zone `{0}` is already declared")]
    DuplicateZone(String),
    #[error("UAV priority {0} is already taken")]
    DuplicatePriority(u32),
    #[error("zone `{0}` overlaps `{1}` without being flagged")]
    Overlap(String, String),
    #[error("robot `{robot}` already holds zone `{zone}`")]
    AlreadyHolding { robot: String, zone: String },
    #[error("robot `{robot}` does not hold zone `{zone}`")]
    NotHeld { robot: String, zone: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Zone {
    pub id: String,
    pub min: Vec3,
    pub max: Vec3,
    /// Allows overlap with other flagged zones.
    pub may_overlap: bool,
}

impl Zone {
    pub fn new(id: &str, min: Vec3, max: Vec3) -> Self {
        Self { id: id.to_string(), min, max, may_overlap: false }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    fn overlaps(&self, o: &Zone) -> bool {
        (0..3).all(|k| self.min[k] < o.max[k] && o.min[k] < self.max[k])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RobotKind {
    Uav,
    Ugv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotEntry {
    pub id: String,
    pub kind: RobotKind,
    pub priority: u32,
    pub zone: Option<String>,
    /// Cruise altitude band `(low, high)`.
    pub altitude_band: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grant {
    Granted,
    Wait,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordEventKind {
    Request,
    Grant,
    Wait,
    Release,
}

impl CoordEventKind {
    pub fn name(self) -> &'static str {
        match self {
            CoordEventKind::Request => "request",
            CoordEventKind::Grant => "grant",
            CoordEventKind::Wait => "wait",
            CoordEventKind::Release => "release",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoordEvent {
    pub tick: u64,
    pub robot: String,
    pub zone: String,
    pub event: CoordEventKind,
}

impl CoordEvent {
    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}", self.tick, self.robot, self.zone, self.event.name())
    }
}

/// Authoritative occupancy registry. Every check-and-record happens inside
/// one `&mut self` call.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZoneRegistry {
    zones: BTreeMap<String, Zone>,
    robots: BTreeMap<String, RobotEntry>,
    waiting: BTreeMap<String, BTreeSet<String>>,
    events: Vec<CoordEvent>,
}

pub type SharedRegistry = Arc<Mutex<ZoneRegistry>>;

impl ZoneRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn into_shared(self) -> SharedRegistry {
        Arc::new(Mutex::new(self))
    }

    pub fn add_zone(&mut self, zone: Zone) -> Result<(), CoordError> {
        if self.zones.contains_key(&zone.id) {
            return Err(CoordError::DuplicateZone(zone.id));
        }
        for z in self.zones.values() {
            if z.overlaps(&zone) && !(z.may_overlap && zone.may_overlap) {
                return Err(CoordError::Overlap(zone.id, z.id.clone()));
            }
        }
        self.zones.insert(zone.id.clone(), zone);
        Ok(())
    }

    pub fn register(&mut self, id: &str, kind: RobotKind, priority: u32, altitude_band: (f64, f64)) -> Result<(), CoordError> {
        if self.robots.contains_key(id) {
            return Err(CoordError::DuplicateRobot(id.to_string()));
        }
        if kind == RobotKind::Uav
            && self.robots.values().any(|r| r.kind == RobotKind::Uav && r.priority == priority)
        {
            return Err(CoordError::DuplicatePriority(priority));
        }
        self.robots.insert(
            id.to_string(),
            RobotEntry { id: id.to_string(), kind, priority, zone: None, altitude_band },
        );
        Ok(())
    }

    pub fn zones(&self) -> impl Iterator<Item = &Zone> {
        self.zones.values()
    }

    pub fn zone(&self, id: &str) -> Option<&Zone> {
        self.zones.get(id)
    }

    pub fn robot(&self, id: &str) -> Option<&RobotEntry> {
        self.robots.get(id)
    }

    pub fn robots(&self) -> impl Iterator<Item = &RobotEntry> {
        self.robots.values()
    }

    /// First declared zone (by id) containing `p`.
    pub fn zone_containing(&self, p: &Vec3) -> Option<&Zone> {
        self.zones.values().find(|z| z.contains(p))
    }

    pub fn events(&self) -> &[CoordEvent] {
        &self.events
    }

    pub fn take_events(&mut self) -> Vec<CoordEvent> {
        std::mem::take(&mut self.events)
    }

    /// Robots currently inside `zone`, by id.
    pub fn occupants(&self, zone: &str) -> Vec<&RobotEntry> {
        self.robots.values().filter(|r| r.zone.as_deref() == Some(zone)).collect()
    }

    pub fn waiters(&self, zone: &str) -> Vec<&str> {
        self.waiting.get(zone).map_or(Vec::new(), |w| w.iter().map(String::as_str).collect())
    }

    fn log(&mut self, tick: u64, robot: &str, zone: &str, event: CoordEventKind) {
        self.events.push(CoordEvent { tick, robot: robot.to_string(), zone: zone.to_string(), event });
    }

    pub fn request_enter(&mut self, robot: &str, zone: &str, tick: u64) -> Result<Grant, CoordError> {
        let me = self.robots.get(robot).ok_or_else(|| CoordError::UnknownRobot(robot.to_string()))?;
        if !self.zones.contains_key(zone) {
            return Err(CoordError::UnknownZone(zone.to_string()));
        }
        if let Some(held) = &me.zone {
            return Err(CoordError::AlreadyHolding { robot: robot.to_string(), zone: held.clone() });
        }
        let (kind, prio) = (me.kind, me.priority);
        let blocked = kind == RobotKind::Uav && {
            let higher = |r: &RobotEntry| r.kind == RobotKind::Uav && r.priority < prio;
            let occupied = self.robots.values().any(|r| higher(r) && r.zone.as_deref() == Some(zone));
            let queued = self
                .waiting
                .get(zone)
                .is_some_and(|w| w.iter().filter_map(|id| self.robots.get(id)).any(higher));
            occupied || queued
        };
        let was_waiting = self.waiting.get(zone).is_some_and(|w| w.contains(robot));
        if !was_waiting {
            self.log(tick, robot, zone, CoordEventKind::Request);
        }
        if blocked {
            if !was_waiting {
                self.waiting.entry(zone.to_string()).or_default().insert(robot.to_string());
                self.log(tick, robot, zone, CoordEventKind::Wait);
            }
            return Ok(Grant::Wait);
        }
        self.withdraw(robot, zone);
        self.robots.get_mut(robot).expect("checked").zone = Some(zone.to_string());
        self.log(tick, robot, zone, CoordEventKind::Grant);
        Ok(Grant::Granted)
    }

    pub fn release(&mut self, robot: &str, zone: &str, tick: u64) -> Result<(), CoordError> {
        let me = self.robots.get_mut(robot).ok_or_else(|| CoordError::UnknownRobot(robot.to_string()))?;
        if me.zone.as_deref() != Some(zone) {
            return Err(CoordError::NotHeld { robot: robot.to_string(), zone: zone.to_string() });
        }
        me.zone = None;
        self.log(tick, robot, zone, CoordEventKind::Release);
        Ok(())
    }

    /// Drops a pending wait, e.g. when the robot gives up on the zone.
    pub fn withdraw(&mut self, robot: &str, zone: &str) {
        if let Some(w) = self.waiting.get_mut(zone) {
            w.remove(robot);
            if w.is_empty() {
                self.waiting.remove(zone);
            }
        }
    }

    pub fn write_events<W: Write>(events: &[CoordEvent], mut w: W) -> std::io::Result<()> {
        writeln!(w, "{COORD_HEADER}")?;
        for e in events {
            writeln!(w, "{}", e.to_csv())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fleet() -> ZoneRegistry {
        let mut r = ZoneRegistry::new();
        r.add_zone(Zone::new("facade-N", Vec3::new(0.0, 10.0, 0.0), Vec3::new(10.0, 12.0, 8.0))).unwrap();
        r.add_zone(Zone::new("facade-S", Vec3::new(0.0, -2.0, 0.0), Vec3::new(10.0, 0.0, 8.0))).unwrap();
        r.register("uav1", RobotKind::Uav, 1, (3.0, 4.0)).unwrap();
        r.register("uav2", RobotKind::Uav, 2, (1.5, 2.5)).unwrap();
        r.register("uav3", RobotKind::Uav, 3, (5.0, 6.0)).unwrap();
        r.register("ugv", RobotKind::Ugv, 0, (0.0, 1.0)).unwrap();
        r
    }

    #[test]
    fn empty_zone_granted_and_release_restores() {
        let mut r = fleet();
        let before = r.clone();
        assert_eq!(r.request_enter("uav2", "facade-N", 1).unwrap(), Grant::Granted);
        r.release("uav2", "facade-N", 2).unwrap();
        r.take_events();
        assert_eq!(r, before);
        assert_eq!(
            r.release("uav2", "facade-N", 3),
            Err(CoordError::NotHeld { robot: "uav2".into(), zone: "facade-N".into() })
        );
    }

    #[test]
    fn higher_priority_blocks_lower() {
        let mut r = fleet();
        r.request_enter("uav1", "facade-N", 1).unwrap();
        assert_eq!(r.request_enter("uav2", "facade-N", 1).unwrap(), Grant::Wait);
        assert_eq!(r.request_enter("uav2", "facade-S", 1).unwrap(), Grant::Granted);
        // lower-priority occupant does not block a higher one
        assert_eq!(r.request_enter("ugv", "facade-S", 1).unwrap(), Grant::Granted);
        r.release("uav1", "facade-N", 2).unwrap();
        assert_eq!(r.request_enter("uav1", "facade-S", 2).unwrap(), Grant::Granted);
        assert_eq!(r.occupants("facade-S").len(), 3);
    }

    #[test]
    fn release_unblocks_highest_waiter_first() {
        let mut r = fleet();
        r.request_enter("uav1", "facade-N", 1).unwrap();
        assert_eq!(r.request_enter("uav3", "facade-N", 1).unwrap(), Grant::Wait);
        assert_eq!(r.request_enter("uav2", "facade-N", 1).unwrap(), Grant::Wait);
        r.release("uav1", "facade-N", 2).unwrap();
        assert_eq!(r.request_enter("uav3", "facade-N", 3).unwrap(), Grant::Wait);
        assert_eq!(r.request_enter("uav2", "facade-N", 3).unwrap(), Grant::Granted);
        assert_eq!(r.request_enter("uav3", "facade-N", 4).unwrap(), Grant::Wait);
        r.release("uav2", "facade-N", 5).unwrap();
        assert_eq!(r.request_enter("uav3", "facade-N", 5).unwrap(), Grant::Granted);
        let log: Vec<String> = r.events().iter().map(CoordEvent::to_csv).collect();
        assert_eq!(&log[..3], &["1,uav1,facade-N,request", "1,uav1,facade-N,grant", "1,uav3,facade-N,request"]);
        assert_eq!(log.last().unwrap(), "5,uav3,facade-N,grant");
    }

    #[test]
    fn errors() {
        let mut r = fleet();
        assert_eq!(r.request_enter("nobody", "facade-N", 0), Err(CoordError::UnknownRobot("nobody".into())));
        assert_eq!(r.request_enter("uav1", "roof", 0), Err(CoordError::UnknownZone("roof".into())));
        r.request_enter("uav1", "facade-N", 0).unwrap();
        assert!(matches!(r.request_enter("uav1", "facade-S", 0), Err(CoordError::AlreadyHolding { .. })));
        assert_eq!(r.register("uav9", RobotKind::Uav, 2, (0.0, 1.0)), Err(CoordError::DuplicatePriority(2)));
        let clash = Zone::new("x", Vec3::new(5.0, 11.0, 1.0), Vec3::new(6.0, 13.0, 2.0));
        assert!(matches!(r.add_zone(clash), Err(CoordError::Overlap(..))));
    }
}
