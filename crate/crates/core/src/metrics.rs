//! Performance series computed from a finished scenario trace.

use serde::{Deserialize, Serialize};

use crate::geometry::PositionSet;
use crate::localization::relative_position_error;
use crate::pulse::HostId;
use crate::sim::ScenarioTrace;

/// One sample of a per-host series. The unit of `value` depends on the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub time: f64,
    pub host: HostId,
    /// Pulse index the sample belongs to.
    pub index: u64,
    pub value: f64,
}

/// `1/T` of every pulse the host sent, stamped at the pulse start. Hz.
pub fn instantaneous_frequency(trace: &ScenarioTrace, host: HostId) -> Vec<SeriesPoint> {
    trace
        .pulses(host)
        .iter()
        .map(|p| SeriesPoint {
            time: p.start,
            host,
            index: p.index,
            value: 1.0 / p.duration,
        })
        .collect()
}

/// The same series shifted by a reference frequency.
pub fn frequency_offset(series: &[SeriesPoint], reference: f64) -> Vec<SeriesPoint> {
    series
        .iter()
        .map(|p| SeriesPoint {
            value: p.value - reference,
            ..*p
        })
        .collect()
}

/// Plotting reference: host 0's anchor frequency, or the mean initial
/// frequency if host 0 never fixed one.
pub fn default_reference_frequency(trace: &ScenarioTrace) -> f64 {
    trace
        .snapshots(HostId(0))
        .iter()
        .rev()
        .find_map(|s| s.anchor_frequency)
        .unwrap_or_else(|| crate::sim::mean_initial_frequency(&trace.config.hosts))
}

/// Index of the start in `starts` (ascending) nearest to `t`, ties to the lower index.
fn nearest_index(starts: &[f64], t: f64) -> Option<usize> {
    if starts.is_empty() {
        return None;
    }
    let i = starts.partition_point(|&s| s < t);
    if i == 0 {
        return Some(0);
    }
    if i == starts.len() {
        return Some(i - 1);
    }
    let below = t - starts[i - 1];
    let above = starts[i] - t;
    Some(if above < below { i } else { i - 1 })
}

/// Mean absolute distance from `t` to the nearest pulse start of every other host, seconds.
pub fn start_time_error(trace: &ScenarioTrace, host: HostId, t: f64) -> f64 {
    let others: Vec<usize> = (0..trace.host_count()).filter(|&q| q != host.0).collect();
    let total: f64 = others
        .iter()
        .filter_map(|&q| {
            let starts = trace.start_times(HostId(q));
            nearest_index(&starts, t).map(|n| (t - starts[n]).abs())
        })
        .sum();
    total / others.len() as f64
}

/// Start-time error evaluated at each of the host's own pulse starts.
pub fn start_time_error_series(trace: &ScenarioTrace, host: HostId) -> Vec<SeriesPoint> {
    let starts: Vec<Vec<f64>> = (0..trace.host_count())
        .map(|q| trace.start_times(HostId(q)))
        .collect();
    let peers = (trace.host_count() - 1) as f64;
    trace
        .pulses(host)
        .iter()
        .map(|p| {
            let sum: f64 = starts
                .iter()
                .enumerate()
                .filter(|(q, _)| *q != host.0)
                .filter_map(|(_, s)| nearest_index(s, p.start).map(|n| (p.start - s[n]).abs()))
                .sum();
            SeriesPoint {
                time: p.start,
                host,
                index: p.index,
                value: sum / peers,
            }
        })
        .collect()
}

/// Procrustes-aligned relative position error of every snapshot that
/// carries a position estimate.
pub fn position_error_series(
    trace: &ScenarioTrace,
    host: HostId,
    truth: &PositionSet,
) -> Vec<SeriesPoint> {
    trace
        .snapshots(host)
        .iter()
        .filter_map(|s| {
            let est = s.positions.as_ref()?;
            let value = relative_position_error(truth, est).ok()?;
            Some(SeriesPoint {
                time: s.time,
                host,
                index: s.index,
                value,
            })
        })
        .collect()
}

/// True host positions of the trace's configuration.
pub fn true_positions(trace: &ScenarioTrace) -> PositionSet {
    PositionSet::from_positions(&trace.config.positions())
}

/// Largest pairwise instantaneous-frequency difference among hosts, taken
/// pulse index by pulse index over `[first, end)`.
pub fn max_frequency_spread(trace: &ScenarioTrace, first: usize, end: usize) -> f64 {
    let hosts = trace.host_count();
    (first..end)
        .filter_map(|n| {
            let freqs: Option<Vec<f64>> = (0..hosts)
                .map(|q| trace.pulses[q].get(n).map(|p| 1.0 / p.duration))
                .collect();
            let freqs = freqs?;
            let max = freqs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = freqs.iter().copied().fold(f64::INFINITY, f64::min);
            Some(max - min)
        })
        .fold(0.0, f64::max)
}

/// Mean instantaneous frequency over all hosts and pulses in `[first, end)`.
pub fn mean_network_frequency(trace: &ScenarioTrace, first: usize, end: usize) -> f64 {
    let values: Vec<f64> = trace
        .pulses
        .iter()
        .flat_map(|ps| ps.iter().skip(first).take(end.saturating_sub(first)))
        .map(|p| 1.0 / p.duration)
        .collect();
    mean(&values)
}

/// Mean of the hosts' anchor frequencies, if all have fixed one.
pub fn mean_anchor_frequency(trace: &ScenarioTrace) -> Option<f64> {
    let anchors: Option<Vec<f64>> = trace
        .snapshots
        .iter()
        .map(|s| s.iter().rev().find_map(|snap| snap.anchor_frequency))
        .collect();
    anchors.map(|a| mean(&a))
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}
