use super::RobotKind;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Task {
    /// Indoor search of a floor (ground robot).
    IndoorFloor(usize),
    /// Facade search of a floor from outside (aerial robot).
    Floor(usize),
    /// Outdoor area plus the ground-floor facade.
    OutdoorAndGroundFacade,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobotSpec {
    pub id: String,
    pub kind: RobotKind,
    pub priority: u32,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Allocation {
    pub tasks: BTreeMap<String, Vec<Task>>,
    pub unassigned: Vec<Task>,
}

/// Ground robot takes the ground floor indoors; UAVs, by priority, take
/// floors 1, 2, ...; the next UAV takes the outdoor area and ground-floor
/// facade. Uncovered tasks are reported.
pub fn assign_tasks(floors: usize, fleet: &[RobotSpec]) -> Allocation {
    let mut out = Allocation::default();
    let mut ugvs: Vec<&RobotSpec> = fleet.iter().filter(|r| r.kind == RobotKind::Ugv).collect();
    ugvs.sort_by(|a, b| (a.priority, &a.id).cmp(&(b.priority, &b.id)));
    let mut uavs: Vec<&RobotSpec> = fleet.iter().filter(|r| r.kind == RobotKind::Uav).collect();
    uavs.sort_by(|a, b| (a.priority, &a.id).cmp(&(b.priority, &b.id)));

    if floors > 0 {
        match ugvs.first() {
            Some(g) => out.tasks.entry(g.id.clone()).or_default().push(Task::IndoorFloor(0)),
            None => out.unassigned.push(Task::IndoorFloor(0)),
        }
    }
    let mut it = uavs.iter();
    for k in 1..floors {
        match it.next() {
            Some(u) => out.tasks.entry(u.id.clone()).or_default().push(Task::Floor(k)),
            None => out.unassigned.push(Task::Floor(k)),
        }
    }
    match it.next() {
        Some(u) => out.tasks.entry(u.id.clone()).or_default().push(Task::OutdoorAndGroundFacade),
        None => out.unassigned.push(Task::OutdoorAndGroundFacade),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(id: &str, kind: RobotKind, p: u32) -> RobotSpec {
        RobotSpec { id: id.into(), kind, priority: p }
    }

    #[test]
    fn three_uavs_one_ugv() {
        let fleet = vec![
            spec("uav3", RobotKind::Uav, 3),
            spec("ugv", RobotKind::Ugv, 0),
            spec("uav1", RobotKind::Uav, 1),
            spec("uav2", RobotKind::Uav, 2),
        ];
        let a = assign_tasks(3, &fleet);
        assert_eq!(a.tasks["ugv"], vec![Task::IndoorFloor(0)]);
        assert_eq!(a.tasks["uav1"], vec![Task::Floor(1)]);
        assert_eq!(a.tasks["uav2"], vec![Task::Floor(2)]);
        assert_eq!(a.tasks["uav3"], vec![Task::OutdoorAndGroundFacade]);
        assert!(a.unassigned.is_empty());
        let mut rev = fleet.clone();
        rev.reverse();
        assert_eq!(assign_tasks(3, &rev), a);
    }

    #[test]
    fn shortage_is_reported() {
        let a = assign_tasks(3, &[spec("uav1", RobotKind::Uav, 1)]);
        assert_eq!(a.tasks["uav1"], vec![Task::Floor(1)]);
        let floors: Vec<_> = a.unassigned.iter().filter(|t| !matches!(t, Task::OutdoorAndGroundFacade)).collect();
        assert_eq!(floors, vec![&Task::IndoorFloor(0), &Task::Floor(2)]);
    }
}
