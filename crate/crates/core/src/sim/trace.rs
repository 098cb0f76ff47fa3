//! Recorded output of one scenario run.

use serde::{Deserialize, Serialize};

use crate::geometry::PositionSet;
use crate::localization::DelayMatrix;
use crate::pulse::{HostId, PulseSchedule};
use crate::sampling::SamplingModel;

use super::config::SimConfig;

/// One transmitted pulse, in global true time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub index: u64,
    pub start: f64,
    pub duration: f64,
}

/// Host state captured at the start of each of its pulses, after the
/// following pulse's duration has been planned.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub index: u64,
    pub time: f64,
    /// First-stage base frequency; `None` while peer durations are still unknown.
    pub base_frequency: Option<f64>,
    pub anchor_frequency: Option<f64>,
    /// Duration requested for the next pulse before any grid snapping.
    pub planned_duration: f64,
    pub delays: DelayMatrix,
    /// Relative position estimate; `None` until every matrix column is known.
    pub positions: Option<PositionSet>,
    pub clamped_mass_fraction: f64,
    pub negative_delays: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTrace {
    pub config: SimConfig,
    pub sampling: SamplingModel,
    pub pulses: Vec<Vec<PulseRecord>>,
    pub snapshots: Vec<Vec<Snapshot>>,
}

impl ScenarioTrace {
    pub fn host_count(&self) -> usize {
        self.pulses.len()
    }

    pub fn pulses(&self, host: HostId) -> &[PulseRecord] {
        &self.pulses[host.0]
    }

    pub fn snapshots(&self, host: HostId) -> &[Snapshot] {
        &self.snapshots[host.0]
    }

    pub fn start_times(&self, host: HostId) -> Vec<f64> {
        self.pulses[host.0].iter().map(|p| p.start).collect()
    }

    /// The host's pulses as a schedule, for phase evaluation.
    pub fn schedule(&self, host: HostId) -> Option<PulseSchedule> {
        let records = &self.pulses[host.0];
        let first = records.first()?;
        PulseSchedule::from_durations(first.start, records.iter().map(|p| p.duration)).ok()
    }

    /// Final delay matrix estimated by each host.
    pub fn final_delays(&self) -> Vec<Option<&DelayMatrix>> {
        self.snapshots
            .iter()
            .map(|s| s.last().map(|snap| &snap.delays))
            .collect()
    }
}
