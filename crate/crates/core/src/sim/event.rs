//! Time-ordered event queue with FIFO tie-breaking.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::node::PhaseVector;
use crate::pulse::HostId;

#[derive(Debug, Clone, PartialEq)]
pub enum EventKind {
    PulseTransmit { host: HostId },
    PulseArrival { from: HostId, to: HostId },
    VectorArrival { from: HostId, to: HostId, vector: PhaseVector },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    /// Global true time, seconds.
    pub time: f64,
    /// Enqueue order; breaks ties between simultaneous events.
    pub sequence: u64,
    pub kind: EventKind,
}

// Reversed so that BinaryHeap pops the earliest (time, sequence) first.
impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.sequence.cmp(&self.sequence))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for Event {}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_sequence: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, kind: EventKind) -> u64 {
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Event {
            time,
            sequence,
            kind,
        });
        sequence
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}
