use std::collections::VecDeque;

/// Delivers messages a fixed number of ticks after they were sent, to
/// exercise decisions made on stale information.
#[derive(Debug, Clone)]
pub struct MessageDelay<T> {
    delay: u64,
    queue: VecDeque<(u64, T)>,
}

impl<T> MessageDelay<T> {
    pub fn new(delay: u64) -> Self {
        Self { delay, queue: VecDeque::new() }
    }

    pub fn send(&mut self, tick: u64, msg: T) {
        self.queue.push_back((tick + self.delay, msg));
    }

    /// Messages due at or before `tick`, in send order.
    pub fn deliver(&mut self, tick: u64) -> Vec<T> {
        let mut out = Vec::new();
        while self.queue.front().is_some_and(|(t, _)| *t <= tick) {
            out.push(self.queue.pop_front().expect("non-empty").1);
        }
        out
    }

    pub fn pending(&self) -> usize {
        self.queue.len()
    }
}
