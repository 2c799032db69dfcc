//! Event-calendar kernel: clock, future-event list and counted resource pools.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, VecDeque};

use thiserror::Error;

/// Model bugs detected by the kernel. Any of these aborts the run.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("event scheduled at {at} before the clock ({clock})")]
    ScheduleInPast { at: f64, clock: f64 },
    #[error("entity {entity} requested pool `{pool}` while already holding or waiting for it")]
    DoubleRequest { pool: String, entity: u64 },
    #[error("entity {entity} released pool `{pool}` without holding it")]
    NotHolder { pool: String, entity: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event<K> {
    pub time: f64,
    pub seq: u64,
    pub kind: K,
    pub entity_id: u64,
}

impl<K> Eq for Event<K> where K: PartialEq {}

impl<K: PartialEq> PartialOrd for Event<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that `BinaryHeap` pops the smallest (time, seq) first.
impl<K: PartialEq> Ord for Event<K> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Future-event list ordered by `(time, seq)`.
#[derive(Debug, Clone)]
pub struct Calendar<K> {
    pending: BinaryHeap<Event<K>>,
    clock: f64,
    seq_counter: u64,
}

impl<K: PartialEq> Default for Calendar<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: PartialEq> Calendar<K> {
    pub fn new() -> Self {
        Self { pending: BinaryHeap::new(), clock: 0.0, seq_counter: 0 }
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Time of the next event without removing it.
    pub fn peek_time(&self) -> Option<f64> {
        self.pending.peek().map(|e| e.time)
    }

    pub fn schedule(&mut self, at: f64, kind: K, entity_id: u64) -> Result<u64, EngineError> {
        if at < self.clock || at.is_nan() {
            return Err(EngineError::ScheduleInPast { at, clock: self.clock });
        }
        let seq = self.seq_counter;
        self.seq_counter += 1;
        self.pending.push(Event { time: at, seq, kind, entity_id });
        Ok(seq)
    }

    /// Removes the earliest event and advances the clock to it. `None` marks
    /// the end of events.
    pub fn next_event(&mut self) -> Option<Event<K>> {
        let ev = self.pending.pop()?;
        self.clock = ev.time;
        Some(ev)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Request {
    Granted,
    Enqueued,
}

/// A counted capacity with a FIFO wait queue.
#[derive(Debug, Clone)]
pub struct ResourcePool {
    name: String,
    capacity: u32,
    holders: BTreeSet<u64>,
    waitq: VecDeque<u64>,
    grants: u64,
    releases: u64,
}

impl ResourcePool {
    pub fn new(name: impl Into<String>, capacity: u32) -> Self {
        Self {
            name: name.into(),
            capacity,
            holders: BTreeSet::new(),
            waitq: VecDeque::new(),
            grants: 0,
            releases: 0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn in_use(&self) -> u32 {
        self.holders.len() as u32
    }

    pub fn available(&self) -> u32 {
        self.capacity - self.in_use()
    }

    pub fn waiting(&self) -> impl Iterator<Item = u64> + '_ {
        self.waitq.iter().copied()
    }

    pub fn holds(&self, entity: u64) -> bool {
        self.holders.contains(&entity)
    }

    pub fn grants(&self) -> u64 {
        self.grants
    }

    pub fn releases(&self) -> u64 {
        self.releases
    }

    fn check_fresh(&self, entity: u64) -> Result<(), EngineError> {
        if self.holders.contains(&entity) || self.waitq.contains(&entity) {
            return Err(EngineError::DoubleRequest { pool: self.name.clone(), entity });
        }
        Ok(())
    }

    fn grant(&mut self, entity: u64) {
        self.holders.insert(entity);
        self.grants += 1;
    }

    /// Takes a unit if one is free, otherwise joins the tail of the queue.
    pub fn request(&mut self, entity: u64) -> Result<Request, EngineError> {
        self.check_fresh(entity)?;
        if self.in_use() < self.capacity {
            self.grant(entity);
            Ok(Request::Granted)
        } else {
            self.waitq.push_back(entity);
            Ok(Request::Enqueued)
        }
    }

    /// Takes a unit if one is free; never queues. Used for day-scoped
    /// commitments (cars, drivers) where a refusal triggers rescheduling.
    pub fn try_acquire(&mut self, entity: u64) -> Result<bool, EngineError> {
        self.check_fresh(entity)?;
        if self.in_use() < self.capacity {
            self.grant(entity);
            Ok(true)
        } else {
            Ok(false)
        }
    }

    /// Returns the unit held by `entity`. If someone is waiting, the unit
    /// passes straight to the head of the queue, whose id is returned.
    pub fn release(&mut self, entity: u64) -> Result<Option<u64>, EngineError> {
        if !self.holders.remove(&entity) {
            return Err(EngineError::NotHolder { pool: self.name.clone(), entity });
        }
        self.releases += 1;
        match self.waitq.pop_front() {
            Some(next) => {
                self.grant(next);
                Ok(Some(next))
            }
            None => Ok(None),
        }
    }
}
