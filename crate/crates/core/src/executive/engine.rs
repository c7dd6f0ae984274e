use super::{Blackboard, BtError, BtNode, DecoratorKind, Status};

pub const EVENT_HEADER: &str = "tick,node_path,status";

/// What a task reports when started or polled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskState {
    Running,
    Finished(Status),
}

/// Asynchronous task contract behind the leaves. `node` is the preorder
/// index of the leaf, stable for the life of the tree.
pub trait TaskRuntime {
    fn start(&mut self, node: usize, task: &str, args: &[String], bb: &mut Blackboard) -> TaskState;
    fn poll(&mut self, node: usize, task: &str, args: &[String], bb: &mut Blackboard) -> TaskState;
    fn cancel(&mut self, node: usize, task: &str, bb: &mut Blackboard);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HandleState {
    #[default]
    Idle,
    Running,
    Finished(Status),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TaskHandle {
    pub state: HandleState,
    /// Times the task was started.
    pub starts: u32,
    /// Ticks that reached the task while it was running.
    pub polls: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub tick: u64,
    pub node_path: String,
    pub status: String,
}

impl EventRecord {
    pub fn to_csv(&self) -> String {
        format!("{},{},{}", self.tick, self.node_path, self.status)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Sequence,
    Fallback,
    Parallel(usize),
    Decorator(DecoratorKind),
    Leaf { task: String, args: Vec<String> },
}

#[derive(Debug, Clone)]
struct Flat {
    kind: Kind,
    children: Vec<usize>,
    path: String,
}

#[derive(Debug, Clone, Default)]
struct NodeState {
    cursor: usize,
    attempts: u32,
    elapsed: u64,
    done: Vec<Option<Status>>,
    handle: TaskHandle,
    running: bool,
}

/// A validated tree plus the execution state of every node. The tree
/// itself is never mutated by ticking.
#[derive(Debug, Clone)]
pub struct BehaviorTree {
    root: BtNode,
    nodes: Vec<Flat>,
    state: Vec<NodeState>,
    tick: u64,
    events: Vec<EventRecord>,
}

fn flatten(n: &BtNode, path: String, out: &mut Vec<Flat>) -> usize {
    let idx = out.len();
    let kind = match n {
        BtNode::Sequence(_) => Kind::Sequence,
        BtNode::Fallback(_) => Kind::Fallback,
        BtNode::Parallel { threshold, .. } => Kind::Parallel(*threshold),
        BtNode::Decorator(k, _) => Kind::Decorator(*k),
        BtNode::Leaf { task, args } => Kind::Leaf { task: task.clone(), args: args.clone() },
    };
    out.push(Flat { kind, children: Vec::new(), path: format!("{path}:{}", n.label()) });
    let mut kids = Vec::new();
    for (j, c) in n.children().iter().enumerate() {
        kids.push(flatten(c, format!("{path}/{j}"), out));
    }
    out[idx].children = kids;
    idx
}

impl BehaviorTree {
    pub fn new(root: BtNode) -> Result<Self, BtError> {
        root.validate()?;
        let mut nodes = Vec::new();
        flatten(&root, "0".into(), &mut nodes);
        let state = nodes
            .iter()
            .map(|n| NodeState { done: vec![None; n.children.len()], ..Default::default() })
            .collect();
        Ok(Self { root, nodes, state, tick: 0, events: Vec::new() })
    }

    pub fn root(&self) -> &BtNode {
        &self.root
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn take_events(&mut self) -> Vec<EventRecord> {
        std::mem::take(&mut self.events)
    }

    /// Handle of the leaf at preorder index `node`.
    pub fn handle(&self, node: usize) -> Option<&TaskHandle> {
        match self.nodes.get(node)?.kind {
            Kind::Leaf { .. } => Some(&self.state[node].handle),
            _ => None,
        }
    }

    /// Total starts over every leaf running `task`.
    pub fn task_starts(&self, task: &str) -> u32 {
        self.nodes
            .iter()
            .zip(&self.state)
            .filter(|(n, _)| matches!(&n.kind, Kind::Leaf { task: t, .. } if t == task))
            .map(|(_, s)| s.handle.starts)
            .sum()
    }

    pub fn node_path(&self, node: usize) -> Option<&str> {
        self.nodes.get(node).map(|n| n.path.as_str())
    }

    pub fn tick(&mut self, bb: &mut Blackboard, rt: &mut dyn TaskRuntime) -> Status {
        self.tick += 1;
        self.tick_node(0, bb, rt)
    }

    /// Cancels everything still running.
    pub fn halt(&mut self, bb: &mut Blackboard, rt: &mut dyn TaskRuntime) {
        self.halt_node(0, bb, rt);
    }

    fn log(&mut self, node: usize, status: &str) {
        self.events.push(EventRecord {
            tick: self.tick,
            node_path: self.nodes[node].path.clone(),
            status: status.to_string(),
        });
    }

    fn tick_node(&mut self, i: usize, bb: &mut Blackboard, rt: &mut dyn TaskRuntime) -> Status {
        let s = self.eval(i, bb, rt);
        let was_running = self.state[i].running;
        self.state[i].running = s == Status::Running;
        if s != Status::Running || !was_running {
            self.log(i, s.name());
        }
        s
    }

    fn eval(&mut self, i: usize, bb: &mut Blackboard, rt: &mut dyn TaskRuntime) -> Status {
        let kind = self.nodes[i].kind.clone();
        let kids = self.nodes[i].children.clone();
        match kind {
            Kind::Sequence | Kind::Fallback => {
                let (stop, pass) = match kind {
                    Kind::Sequence => (Status::Failure, Status::Success),
                    _ => (Status::Success, Status::Failure),
                };
                let mut k = self.state[i].cursor;
                while k < kids.len() {
                    let s = self.tick_node(kids[k], bb, rt);
                    if s == Status::Running {
                        self.state[i].cursor = k;
                        return s;
                    }
                    if s == stop {
                        self.state[i].cursor = 0;
                        return s;
                    }
                    k += 1;
                }
                self.state[i].cursor = 0;
                pass
            }
            Kind::Parallel(threshold) => {
                for (k, &c) in kids.iter().enumerate() {
                    if self.state[i].done[k].is_none() {
                        let s = self.tick_node(c, bb, rt);
                        if s != Status::Running {
                            self.state[i].done[k] = Some(s);
                        }
                    }
                }
                let done = &self.state[i].done;
                let ok = done.iter().filter(|d| **d == Some(Status::Success)).count();
                let failed = done.contains(&Some(Status::Failure));
                if failed || ok >= threshold {
                    for (k, &c) in kids.iter().enumerate() {
                        if self.state[i].done[k].is_none() {
                            self.halt_node(c, bb, rt);
                        }
                    }
                    self.state[i].done.iter_mut().for_each(|d| *d = None);
                    return if failed { Status::Failure } else { Status::Success };
                }
                Status::Running
            }
            Kind::Decorator(d) => {
                let c = kids[0];
                match d {
                    DecoratorKind::Inverter => match self.tick_node(c, bb, rt) {
                        Status::Success => Status::Failure,
                        Status::Failure => Status::Success,
                        Status::Running => Status::Running,
                    },
                    DecoratorKind::ForceSuccess => match self.tick_node(c, bb, rt) {
                        Status::Running => Status::Running,
                        _ => Status::Success,
                    },
                    DecoratorKind::Retry(n) => loop {
                        match self.tick_node(c, bb, rt) {
                            Status::Failure => {
                                self.state[i].attempts += 1;
                                if self.state[i].attempts >= n {
                                    self.state[i].attempts = 0;
                                    return Status::Failure;
                                }
                            }
                            Status::Success => {
                                self.state[i].attempts = 0;
                                return Status::Success;
                            }
                            Status::Running => return Status::Running,
                        }
                    },
                    DecoratorKind::Timeout(limit) => {
                        if self.state[i].elapsed >= limit {
                            self.halt_node(c, bb, rt);
                            self.state[i].elapsed = 0;
                            return Status::Failure;
                        }
                        let s = self.tick_node(c, bb, rt);
                        if s == Status::Running {
                            self.state[i].elapsed += 1;
                        } else {
                            self.state[i].elapsed = 0;
                        }
                        s
                    }
                }
            }
            Kind::Leaf { task, args } => {
                let h = &mut self.state[i].handle;
                let st = if h.state == HandleState::Running {
                    h.polls += 1;
                    rt.poll(i, &task, &args, bb)
                } else {
                    h.starts += 1;
                    rt.start(i, &task, &args, bb)
                };
                let h = &mut self.state[i].handle;
                match st {
                    TaskState::Finished(s) if s != Status::Running => {
                        h.state = HandleState::Finished(s);
                        s
                    }
                    _ => {
                        h.state = HandleState::Running;
                        Status::Running
                    }
                }
            }
        }
    }

    fn halt_node(&mut self, i: usize, bb: &mut Blackboard, rt: &mut dyn TaskRuntime) {
        for c in self.nodes[i].children.clone() {
            self.halt_node(c, bb, rt);
        }
        if let Kind::Leaf { task, .. } = &self.nodes[i].kind {
            if self.state[i].handle.state == HandleState::Running {
                rt.cancel(i, task, bb);
                self.state[i].handle.state = HandleState::Idle;
            }
        }
        let st = &mut self.state[i];
        st.cursor = 0;
        st.attempts = 0;
        st.elapsed = 0;
        st.done.iter_mut().for_each(|d| *d = None);
        if st.running {
            st.running = false;
            self.log(i, "HALTED");
        }
    }
}
