//! Deterministic discrete-event simulation of a fully connected network.
//!
//! One scenario runs single-threaded over a time-ordered queue. Each pulse
//! transmission fans out a line-of-sight arrival to every peer after the
//! geometric delay; the sender's phase vector rides along on the same pulse
//! and is delivered just before it. Nodes only ever see timestamps quantized
//! on their own sampling grid.

mod config;
mod event;
mod trace;

pub use config::{
    default_coupling_gain, mean_initial_frequency, ns, reference_hosts, scenario_preset, to_ns,
    ConfigError, HostConfig, Scenario, SimConfig, DEFAULT_COUPLING_FRACTION,
    DEFAULT_PULSE_BUDGET, DEFAULT_SAMPLING_FACTOR, DEFAULT_VECTOR_CADENCE,
    DRIFT_COMPENSATION_GAMMA, FINITE_SAMPLE_RATE_HZ,
};
pub use event::{Event, EventKind, EventQueue};
pub use trace::{PulseRecord, ScenarioTrace, Snapshot};

pub use crate::sampling::quantize_time;

use thiserror::Error;

use crate::geometry::propagation_delay;
use crate::node::{NodeError, NodeState};
use crate::pulse::HostId;
use crate::sampling::{QuantizationMode, SampleRate, SamplingModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{host} diverged while planning pulse {pulse} at t = {time:e} s: {source}")]
    Divergence {
        host: HostId,
        pulse: u64,
        time: f64,
        source: NodeError,
    },
    #[error("{host} rejected an event at t = {time:e} s: {source}")]
    Node {
        host: HostId,
        time: f64,
        source: NodeError,
    },
    #[error("event at t = {time:e} s processed after t = {previous:e} s")]
    Causality { time: f64, previous: f64 },
}

/// Runs a scenario until every host has transmitted its pulse budget and all
/// in-flight arrivals have been delivered.
pub fn run_scenario(config: &SimConfig) -> Result<ScenarioTrace, SimError> {
    config.validate()?;
    let hosts = config.host_count();
    let sampling = SamplingModel::seeded(config.sample_rate, hosts, config.rng_seed);
    let snap_tx = matches!(config.sample_rate, SampleRate::Hz(_))
        && config.quantization == QuantizationMode::Both;
    let positions = config.positions();
    let delays: Vec<Vec<f64>> = (0..hosts)
        .map(|a| {
            (0..hosts)
                .map(|b| propagation_delay(&positions[a], &positions[b]))
                .collect()
        })
        .collect();

    let params = config.sync_params();
    let mut nodes: Vec<NodeState> = config
        .hosts
        .iter()
        .enumerate()
        .map(|(q, h)| NodeState::new(HostId(q), hosts, params, h.initial_duration))
        .collect();

    let budget = config.pulse_budget as usize;
    let mut pulses = vec![Vec::with_capacity(budget); hosts];
    let mut snapshots = vec![Vec::with_capacity(budget); hosts];

    let mut queue = EventQueue::new();
    for (q, h) in config.hosts.iter().enumerate() {
        let start = if snap_tx {
            quantize_time(h.initial_start, &sampling, HostId(q))
        } else {
            h.initial_start
        };
        queue.schedule(start, EventKind::PulseTransmit { host: HostId(q) });
    }

    let mut clock = f64::NEG_INFINITY;
    while let Some(event) = queue.pop() {
        if event.time < clock {
            return Err(SimError::Causality {
                time: event.time,
                previous: clock,
            });
        }
        clock = event.time;
        let t = event.time;

        match event.kind {
            EventKind::PulseTransmit { host } => {
                let q = host.0;
                let node = &mut nodes[q];
                let index = pulses[q].len() as u64;
                let planned = node.next_duration();
                let mut duration = if snap_tx {
                    quantize_time(t + planned, &sampling, host) - t
                } else {
                    planned
                };
                if duration.is_nan() || duration <= 0.0 {
                    // a pulse cannot be shorter than one sampling tick
                    duration = sampling.sample_rate.period().unwrap_or(planned);
                }
                let visible_start = quantize_time(t, &sampling, host);
                node.begin_pulse(index, visible_start, duration);
                pulses[q].push(PulseRecord {
                    index,
                    start: t,
                    duration,
                });

                let send_vector = index.is_multiple_of(config.vector_cadence as u64);
                let vector = send_vector.then(|| node.own_phase_vector());
                for r in (0..hosts).filter(|&r| r != q) {
                    let arrival = t + delays[q][r];
                    if let Some(v) = &vector {
                        queue.schedule(
                            arrival,
                            EventKind::VectorArrival {
                                from: host,
                                to: HostId(r),
                                vector: v.clone(),
                            },
                        );
                    }
                    queue.schedule(
                        arrival,
                        EventKind::PulseArrival {
                            from: host,
                            to: HostId(r),
                        },
                    );
                }
                if pulses[q].len() < budget {
                    queue.schedule(t + duration, EventKind::PulseTransmit { host });
                }

                let planned_duration =
                    node.plan_next_duration()
                        .map_err(|source| SimError::Divergence {
                            host,
                            pulse: index,
                            time: t,
                            source,
                        })?;
                snapshots[q].push(snapshot(node, index, t, planned_duration));
            }
            EventKind::VectorArrival { to, vector, .. } => {
                nodes[to.0]
                    .on_phase_vector_received(&vector)
                    .map_err(|source| SimError::Node {
                        host: to,
                        time: t,
                        source,
                    })?;
            }
            EventKind::PulseArrival { from, to } => {
                let rx_time = quantize_time(t, &sampling, to);
                nodes[to.0]
                    .on_pulse_received(from, rx_time)
                    .map_err(|source| SimError::Node {
                        host: to,
                        time: t,
                        source,
                    })?;
            }
        }
    }

    Ok(ScenarioTrace {
        config: config.clone(),
        sampling,
        pulses,
        snapshots,
    })
}

fn snapshot(node: &NodeState, index: u64, time: f64, planned_duration: f64) -> Snapshot {
    let base_frequency = if node.has_all_duration_estimates() {
        node.compute_base_frequency().ok()
    } else {
        None
    };
    let delays = node.estimate_delays();
    let (positions, clamped_mass_fraction, negative_delays) = match node.estimate_positions() {
        Some(Ok(e)) => (Some(e.positions), e.clamped_mass_fraction, e.negative_delays),
        _ => (None, 0.0, delays.negative_entries()),
    };
    Snapshot {
        index,
        time,
        base_frequency,
        anchor_frequency: node.anchor_frequency(),
        planned_duration,
        delays,
        positions,
        clamped_mass_fraction,
        negative_delays,
    }
}
