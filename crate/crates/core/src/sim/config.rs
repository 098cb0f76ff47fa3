//! Scenario configuration and the built-in presets.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Position;
use crate::node::SyncParams;
use crate::sampling::{QuantizationMode, SampleRate};

pub const DEFAULT_PULSE_BUDGET: u64 = 2000;
pub const DEFAULT_SAMPLING_FACTOR: u32 = 8;
pub const DEFAULT_VECTOR_CADENCE: u32 = 1;
/// Default coupling gain as a fraction of the mean initial frequency.
pub const DEFAULT_COUPLING_FRACTION: f64 = 0.02;

/// Finite receiver sampling rate of scenarios B and C.
pub const FINITE_SAMPLE_RATE_HZ: f64 = 800e6;
/// Drift compensation gain of scenario C.
pub const DRIFT_COMPENSATION_GAMMA: f64 = 0.05;

/// Nanoseconds to seconds.
pub fn ns(value: f64) -> f64 {
    value / 1e9
}

/// Seconds to nanoseconds.
pub fn to_ns(seconds: f64) -> f64 {
    seconds * 1e9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostConfig {
    /// Duration of the first pulse, seconds.
    pub initial_duration: f64,
    /// Start of the first pulse, seconds.
    pub initial_start: f64,
    /// Position, meters.
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub hosts: Vec<HostConfig>,
    pub sample_rate: SampleRate,
    pub quantization: QuantizationMode,
    pub gamma: f64,
    /// Second-stage coupling gain, Hz.
    pub coupling_gain: f64,
    pub sampling_factor: u32,
    /// Pulses transmitted by every host.
    pub pulse_budget: u64,
    /// A phase vector rides on every `vector_cadence`-th pulse.
    pub vector_cadence: u32,
    /// Seed for the per-host sampling grid offsets.
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("at least two hosts are required, got {0}")]
    TooFewHosts(usize),
    #[error("hosts[{host}].duration must be positive and finite, got {value:e} s")]
    InvalidDuration { host: usize, value: f64 },
    #[error("hosts[{host}].start must be non-negative and finite, got {value:e} s")]
    InvalidStart { host: usize, value: f64 },
    #[error("hosts[{host}].position must be finite")]
    InvalidPosition { host: usize },
    #[error("sampling rate must be positive or infinite")]
    InvalidSampleRate,
    #[error("gamma must be finite, got {0}")]
    InvalidGamma(f64),
    #[error("coupling gain must be finite and non-negative, got {0}")]
    InvalidCouplingGain(f64),
    #[error("sampling factor must be at least 1")]
    InvalidSamplingFactor,
    #[error("pulse budget must be at least 2, got {0}")]
    InvalidPulseBudget(u64),
    #[error("vector cadence must be at least 1")]
    InvalidVectorCadence,
    #[error("unknown scenario `{0}` (expected A, B or C)")]
    UnknownScenario(String),
}

/// Mean of the hosts' initial frequencies, Hz.
pub fn mean_initial_frequency(hosts: &[HostConfig]) -> f64 {
    hosts.iter().map(|h| 1.0 / h.initial_duration).sum::<f64>() / hosts.len() as f64
}

/// Coupling gain used when none is given: a fixed fraction of the mean
/// initial frequency.
pub fn default_coupling_gain(hosts: &[HostConfig]) -> f64 {
    DEFAULT_COUPLING_FRACTION * mean_initial_frequency(hosts)
}

impl SimConfig {
    pub fn host_count(&self) -> usize {
        self.hosts.len()
    }

    pub fn sync_params(&self) -> SyncParams {
        SyncParams {
            gamma: self.gamma,
            coupling_gain: self.coupling_gain,
            sampling_factor: self.sampling_factor,
        }
    }

    pub fn positions(&self) -> Vec<Position> {
        self.hosts.iter().map(|h| h.position).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.hosts.len() < 2 {
            return Err(ConfigError::TooFewHosts(self.hosts.len()));
        }
        for (i, h) in self.hosts.iter().enumerate() {
            if !(h.initial_duration.is_finite() && h.initial_duration > 0.0) {
                return Err(ConfigError::InvalidDuration {
                    host: i,
                    value: h.initial_duration,
                });
            }
            if !(h.initial_start.is_finite() && h.initial_start >= 0.0) {
                return Err(ConfigError::InvalidStart {
                    host: i,
                    value: h.initial_start,
                });
            }
            if !h.position.iter().all(|v| v.is_finite()) {
                return Err(ConfigError::InvalidPosition { host: i });
            }
        }
        if !self.sample_rate.is_valid() {
            return Err(ConfigError::InvalidSampleRate);
        }
        if !self.gamma.is_finite() {
            return Err(ConfigError::InvalidGamma(self.gamma));
        }
        if !(self.coupling_gain.is_finite() && self.coupling_gain >= 0.0) {
            return Err(ConfigError::InvalidCouplingGain(self.coupling_gain));
        }
        if self.sampling_factor < 1 {
            return Err(ConfigError::InvalidSamplingFactor);
        }
        if self.pulse_budget < 2 {
            return Err(ConfigError::InvalidPulseBudget(self.pulse_budget));
        }
        if self.vector_cadence < 1 {
            return Err(ConfigError::InvalidVectorCadence);
        }
        Ok(())
    }
}

/// The four reference hosts: initial duration, first start (ns) and position (m).
pub fn reference_hosts() -> Vec<HostConfig> {
    const TABLE: [(f64, f64, [f64; 3]); 4] = [
        (142.86, 64.29, [0.0, 0.0, 0.0]),
        (125.00, 6.25, [30.0, 10.0, 0.0]),
        (136.99, 22.60, [10.0, -30.0, -10.0]),
        (131.58, 32.89, [20.0, -25.0, 20.0]),
    ];
    TABLE
        .iter()
        .map(|&(duration, start, [x, y, z])| HostConfig {
            initial_duration: ns(duration),
            initial_start: ns(start),
            position: Position::new(x, y, z),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    /// Infinite sampling rate, no drift compensation.
    A,
    /// 800 MHz sampling, no drift compensation.
    B,
    /// 800 MHz sampling with drift compensation.
    C,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::A, Scenario::B, Scenario::C];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::A => "A",
            Scenario::B => "B",
            Scenario::C => "C",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(Scenario::A),
            "B" | "b" => Ok(Scenario::B),
            "C" | "c" => Ok(Scenario::C),
            other => Err(ConfigError::UnknownScenario(other.to_string())),
        }
    }
}

pub fn scenario_preset(scenario: Scenario) -> SimConfig {
    let hosts = reference_hosts();
    let (sample_rate, gamma) = match scenario {
        Scenario::A => (SampleRate::Infinite, 0.0),
        Scenario::B => (SampleRate::Hz(FINITE_SAMPLE_RATE_HZ), 0.0),
        Scenario::C => (SampleRate::Hz(FINITE_SAMPLE_RATE_HZ), DRIFT_COMPENSATION_GAMMA),
    };
    let coupling_gain = default_coupling_gain(&hosts);
    SimConfig {
        hosts,
        sample_rate,
        quantization: QuantizationMode::Both,
        gamma,
        coupling_gain,
        sampling_factor: DEFAULT_SAMPLING_FACTOR,
        pulse_budget: DEFAULT_PULSE_BUDGET,
        vector_cadence: DEFAULT_VECTOR_CADENCE,
        rng_seed: 0,
    }
}
