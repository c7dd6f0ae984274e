//! Behavior-tree engine and the firefighting mission trees.
//!
//! Sequence and Fallback keep memory: a child that returned RUNNING is
//! resumed on the next tick instead of re-ticking earlier children.
//! Abandoned running subtrees are halted, which cancels their leaf tasks.

mod engine;
mod mission;
mod text;

pub use engine::{BehaviorTree, EventRecord, TaskHandle, TaskRuntime, TaskState, EVENT_HEADER};
pub use mission::build_fire_mission_tree;
pub use text::{load_tree, serialize_tree};

use crate::geometry::Vec3;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Success,
    Failure,
    Running,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Success => "SUCCESS",
            Status::Failure => "FAILURE",
            Status::Running => "RUNNING",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoratorKind {
    Inverter,
    ForceSuccess,
    /// Up to `n` attempts of a failing child.
    Retry(u32),
    /// Child fails if still running after this many ticks.
    Timeout(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum BtNode {
    Sequence(Vec<BtNode>),
    Fallback(Vec<BtNode>),
    /// Succeeds once `threshold` children succeeded; fails on the first
    /// child failure.
    Parallel { threshold: usize, children: Vec<BtNode> },
    Decorator(DecoratorKind, Box<BtNode>),
    Leaf { task: String, args: Vec<String> },
}

impl BtNode {
    pub fn leaf(task: &str, args: &[&str]) -> Self {
        BtNode::Leaf { task: task.to_string(), args: args.iter().map(|s| s.to_string()).collect() }
    }

    pub fn decorate(kind: DecoratorKind, child: BtNode) -> Self {
        BtNode::Decorator(kind, Box::new(child))
    }

    pub fn children(&self) -> &[BtNode] {
        match self {
            BtNode::Sequence(c) | BtNode::Fallback(c) | BtNode::Parallel { children: c, .. } => c,
            BtNode::Decorator(_, c) => std::slice::from_ref(c),
            BtNode::Leaf { .. } => &[],
        }
    }

    pub fn label(&self) -> String {
        match self {
            BtNode::Sequence(_) => "Sequence".into(),
            BtNode::Fallback(_) => "Fallback".into(),
            BtNode::Parallel { threshold, .. } => format!("Parallel({threshold})"),
            BtNode::Decorator(DecoratorKind::Inverter, _) => "Inverter".into(),
            BtNode::Decorator(DecoratorKind::ForceSuccess, _) => "ForceSuccess".into(),
            BtNode::Decorator(DecoratorKind::Retry(n), _) => format!("Retry({n})"),
            BtNode::Decorator(DecoratorKind::Timeout(t), _) => format!("Timeout({t})"),
            BtNode::Leaf { task, .. } => format!("Leaf({task})"),
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(BtNode::size).sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), BtError> {
        match self {
            BtNode::Sequence(c) | BtNode::Fallback(c) if c.is_empty() => {
                return Err(BtError::Arity(format!("{} needs at least one child", self.label())));
            }
            BtNode::Parallel { threshold, children } => {
                if children.is_empty() || *threshold == 0 || *threshold > children.len() {
                    return Err(BtError::Arity(format!(
                        "Parallel({threshold}) with {} children",
                        children.len()
                    )));
                }
            }
            BtNode::Decorator(DecoratorKind::Retry(0), _) => {
                return Err(BtError::Arity("Retry needs at least one attempt".into()));
            }
            BtNode::Leaf { task, .. } if task.is_empty() => {
                return Err(BtError::Arity("leaf without a task id".into()));
            }
            _ => {}
        }
        self.children().iter().try_for_each(BtNode::validate)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum BtError {
    #[error("arity violation: {0}")]
    Arity(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Bool(bool),
    Int(i64),
    Float(f64),
    Text(String),
    Point(Vec3),
}

/// Keyed store shared by the nodes of one tree.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Blackboard {
    entries: BTreeMap<String, Value>,
}

impl Blackboard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, v: Value) {
        self.entries.insert(key.to_string(), v);
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn remove(&mut self, key: &str) -> Option<Value> {
        self.entries.remove(key)
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        match self.get(key) {
            Some(Value::Bool(b)) => Some(*b),
            _ => None,
        }
    }

    pub fn get_point(&self, key: &str) -> Option<Vec3> {
        match self.get(key) {
            Some(Value::Point(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn get_int(&self, key: &str) -> Option<i64> {
        match self.get(key) {
            Some(Value::Int(i)) => Some(*i),
            _ => None,
        }
    }
}
