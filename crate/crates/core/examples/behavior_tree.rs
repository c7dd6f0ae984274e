//! Loads a tree description and ticks it against a toy runtime in which
//! every leaf runs for a given number of ticks and then reports a given
//! outcome. Prints the event log.

use embr::executive::{load_tree, Blackboard, BehaviorTree, Status, TaskRuntime, TaskState, EVENT_HEADER};
use std::collections::HashMap;

#[derive(Default)]
struct Toy {
    left: HashMap<usize, u32>,
}

impl Toy {
    fn outcome(args: &[String]) -> TaskState {
        match args.get(1).map(String::as_str) {
            Some("failure") => TaskState::Finished(Status::Failure),
            _ => TaskState::Finished(Status::Success),
        }
    }
}

impl TaskRuntime for Toy {
    fn start(&mut self, node: usize, task: &str, args: &[String], bb: &mut Blackboard) -> TaskState {
        let n: u32 = args.first().and_then(|a| a.parse().ok()).unwrap_or(1);
        self.left.insert(node, n);
        self.poll(node, task, args, bb)
    }

    fn poll(&mut self, node: usize, _task: &str, args: &[String], _bb: &mut Blackboard) -> TaskState {
        let left = self.left.entry(node).or_insert(1);
        *left = left.saturating_sub(1);
        if *left == 0 {
            Self::outcome(args)
        } else {
            TaskState::Running
        }
    }

    fn cancel(&mut self, node: usize, _task: &str, _bb: &mut Blackboard) {
        self.left.remove(&node);
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/data/patrol.bt").into());
    let mut tree = BehaviorTree::new(load_tree(&std::fs::read_to_string(path)?)?)?;
    let (mut bb, mut rt) = (Blackboard::new(), Toy::default());
    let mut status = Status::Running;
    while status == Status::Running && tree.tick_count() < 50 {
        status = tree.tick(&mut bb, &mut rt);
    }
    println!("{EVENT_HEADER}");
    for e in tree.events() {
        println!("{}", e.to_csv());
    }
    println!("finished {} after {} ticks", status.name(), tree.tick_count());
    Ok(())
}
