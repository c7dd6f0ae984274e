//! Allocates tasks to a mixed fleet, then has three UAVs contend for one
//! zone, each holding it for three ticks. A UAV waits while a UAV with a
//! lower priority number is inside or queued.

use embr::coordination::{assign_tasks, Grant, RobotKind, RobotSpec, Zone, ZoneRegistry};
use embr::Vec3;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fleet = [
        RobotSpec { id: "ugv".into(), kind: RobotKind::Ugv, priority: 0 },
        RobotSpec { id: "uav1".into(), kind: RobotKind::Uav, priority: 1 },
        RobotSpec { id: "uav2".into(), kind: RobotKind::Uav, priority: 2 },
        RobotSpec { id: "uav3".into(), kind: RobotKind::Uav, priority: 3 },
    ];
    let alloc = assign_tasks(2, &fleet);
    for (robot, tasks) in &alloc.tasks {
        println!("{robot}: {tasks:?}");
    }
    println!("unassigned: {:?}\n", alloc.unassigned);

    let mut reg = ZoneRegistry::new();
    reg.add_zone(Zone::new("facade", Vec3::new(0.0, 0.0, 0.0), Vec3::new(10.0, 4.0, 9.0)))?;
    for r in &fleet[1..] {
        reg.register(&r.id, r.kind, r.priority, (0.5, 8.0))?;
    }
    // robot, ticks left inside (None until granted), done
    let mut state: Vec<(&str, Option<u32>, bool)> = vec![("uav1", None, false), ("uav2", None, false), ("uav3", None, false)];
    for tick in 0..12u64 {
        for (r, left, done) in state.iter_mut() {
            if *done {
                continue;
            }
            match left {
                None => {
                    if reg.request_enter(r, "facade", tick)? == Grant::Granted {
                        *left = Some(3);
                    }
                }
                Some(0) => {
                    reg.release(r, "facade", tick)?;
                    *done = true;
                }
                Some(n) => *n -= 1,
            }
        }
    }
    for e in reg.events() {
        println!("{}", e.to_csv());
    }
    Ok(())
}
