//! Pulse schedules and the unwrapped transmit/receive phase they induce.
//!
//! A host emits an endless concatenation of time-stretched base pulses. Pulse
//! `n` of host `q` starts at `t[n]` and lasts `T[n]`, with `t[n+1] = t[n] + T[n]`.
//! The phase advances linearly by `2π` across each pulse, so at any instant it
//! is `2π (m + (t - t[m]) / T[m])` where `m` is the index of the pulse in
//! flight. Only the number of earlier pulses enters the phase, never their
//! lengths.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a host in a fully connected network of `P` hosts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HostId(pub usize);

impl HostId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for HostId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "host {}", self.0)
    }
}

/// Unwrapped phase in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Phase(pub f64);

impl Phase {
    pub fn radians(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("time {t:e} s precedes the first pulse start {first_start:e} s")]
    BeforeFirstPulse { t: f64, first_start: f64 },
    #[error("time {t:e} s lies past the end of the recorded schedule ({end:e} s)")]
    BeyondSchedule { t: f64, end: f64 },
    #[error("pulse duration must be strictly positive and finite, got {0:e} s")]
    InvalidDuration(f64),
}

/// History of one host's pulse start times and durations.
///
/// Only the first start and the durations are free; every later start is the
/// running sum, so the recurrence `start[n+1] = start[n] + duration[n]` holds
/// bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSchedule {
    starts: Vec<f64>,
    durations: Vec<f64>,
}

impl PulseSchedule {
    /// Schedule holding the first pulse only.
    pub fn new(first_start: f64, first_duration: f64) -> Result<Self, PhaseError> {
        check_duration(first_duration)?;
        Ok(Self {
            starts: vec![first_start],
            durations: vec![first_duration],
        })
    }

    /// Builds a schedule from a first start and a sequence of durations.
    pub fn from_durations(
        first_start: f64,
        durations: impl IntoIterator<Item = f64>,
    ) -> Result<Self, PhaseError> {
        let mut it = durations.into_iter();
        let first = it.next().ok_or(PhaseError::InvalidDuration(0.0))?;
        let mut schedule = Self::new(first_start, first)?;
        for d in it {
            schedule.push(d)?;
        }
        Ok(schedule)
    }

    /// Appends the pulse following the last one.
    pub fn push(&mut self, duration: f64) -> Result<(), PhaseError> {
        check_duration(duration)?;
        let next_start = self.end();
        self.starts.push(next_start);
        self.durations.push(duration);
        Ok(())
    }

    pub fn first_start(&self) -> f64 {
        self.starts[0]
    }

    pub fn first_duration(&self) -> f64 {
        self.durations[0]
    }

    pub fn start_times(&self) -> &[f64] {
        &self.starts
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn len(&self) -> usize {
        self.starts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.starts.is_empty()
    }

    /// Instant at which the last recorded pulse ends.
    pub fn end(&self) -> f64 {
        let last = self.starts.len() - 1;
        self.starts[last] + self.durations[last]
    }

    /// Index of the pulse in flight at time `t`.
    pub fn pulse_index_at(&self, t: f64) -> Result<usize, PhaseError> {
        if t < self.first_start() {
            return Err(PhaseError::BeforeFirstPulse {
                t,
                first_start: self.first_start(),
            });
        }
        // last n with starts[n] <= t
        let n = self.starts.partition_point(|&s| s <= t) - 1;
        if n == self.starts.len() - 1 && t >= self.end() {
            return Err(PhaseError::BeyondSchedule { t, end: self.end() });
        }
        Ok(n)
    }
}

fn check_duration(d: f64) -> Result<(), PhaseError> {
    if d.is_finite() && d > 0.0 {
        Ok(())
    } else {
        Err(PhaseError::InvalidDuration(d))
    }
}

/// Unwrapped transmit phase of a host at time `t`.
pub fn transmit_phase(schedule: &PulseSchedule, t: f64) -> Result<Phase, PhaseError> {
    let m = schedule.pulse_index_at(t)?;
    let start = schedule.starts[m];
    let duration = schedule.durations[m];
    Ok(Phase(TAU * (m as f64 + (t - start) / duration)))
}

/// Phase of a peer's line-of-sight signal as seen after a constant propagation delay.
pub fn receive_phase(schedule: &PulseSchedule, delay: f64, t: f64) -> Result<Phase, PhaseError> {
    transmit_phase(schedule, t - delay)
}
