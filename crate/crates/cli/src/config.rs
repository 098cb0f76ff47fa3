//! JSON scenario files.
//!
//! ```json
//! {
//!   "hosts": [{ "duration_ns": 142.86, "start_ns": 64.29, "position_m": [0, 0, 0] }, ...],
//!   "sampling_hz": 800e6,          // or "inf"
//!   "gamma": 0.05,
//!   "coupling_gain_hz": 149500.0,  // default: 2% of the mean initial frequency
//!   "sampling_factor": 8,
//!   "pulses": 2000,
//!   "vector_cadence": 1,
//!   "seed": 0,
//!   "quantization": "both"         // or "rx_only"
//! }
//! ```
//!
//! Only `hosts` is required. Unknown keys are rejected.

use std::fs;
use std::path::Path;

use kls_core::sim::{
    default_coupling_gain, ns, to_ns, ConfigError, HostConfig, SimConfig, DEFAULT_PULSE_BUDGET,
    DEFAULT_SAMPLING_FACTOR, DEFAULT_VECTOR_CADENCE,
};
use kls_core::{Position, QuantizationMode, SampleRate};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HostEntry {
    pub duration_ns: f64,
    pub start_ns: f64,
    pub position_m: [f64; 3],
}

/// `sampling_hz` accepts a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SamplingHz {
    Hz(f64),
    Named(String),
}

impl SamplingHz {
    pub fn parse(&self) -> Result<SampleRate, String> {
        match self {
            SamplingHz::Hz(v) => Ok(SampleRate::Hz(*v)),
            SamplingHz::Named(s) if s.eq_ignore_ascii_case("inf") => Ok(SampleRate::Infinite),
            SamplingHz::Named(s) => Err(format!("expected a number or \"inf\", got \"{s}\"")),
        }
    }
}

impl From<SampleRate> for SamplingHz {
    fn from(rate: SampleRate) -> Self {
        match rate {
            SampleRate::Infinite => SamplingHz::Named("inf".into()),
            SampleRate::Hz(v) => SamplingHz::Hz(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub hosts: Vec<HostEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_hz: Option<SamplingHz>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_gain_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampling_factor: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulses: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector_cadence: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantization: Option<QuantizationMode>,
}

impl ConfigFile {
    /// Fully specified file describing `config`.
    pub fn from_config(config: &SimConfig) -> Self {
        Self {
            hosts: config
                .hosts
                .iter()
                .map(|h| HostEntry {
                    duration_ns: to_ns(h.initial_duration),
                    start_ns: to_ns(h.initial_start),
                    position_m: [h.position.x, h.position.y, h.position.z],
                })
                .collect(),
            sampling_hz: Some(config.sample_rate.into()),
            gamma: Some(config.gamma),
            coupling_gain_hz: Some(config.coupling_gain),
            sampling_factor: Some(config.sampling_factor),
            pulses: Some(config.pulse_budget),
            vector_cadence: Some(config.vector_cadence),
            seed: Some(config.rng_seed),
            quantization: Some(config.quantization),
        }
    }

    /// Fills defaults and validates.
    pub fn into_config(self) -> Result<SimConfig, CliError> {
        let hosts: Vec<HostConfig> = self
            .hosts
            .iter()
            .map(|h| HostConfig {
                initial_duration: ns(h.duration_ns),
                initial_start: ns(h.start_ns),
                position: Position::new(h.position_m[0], h.position_m[1], h.position_m[2]),
            })
            .collect();
        let sample_rate = match &self.sampling_hz {
            None => SampleRate::Infinite,
            Some(s) => s.parse().map_err(|msg| config_error("sampling_hz", msg))?,
        };
        let coupling_gain = match self.coupling_gain_hz {
            Some(k) => k,
            None if hosts.is_empty() => 0.0,
            None => default_coupling_gain(&hosts),
        };
        let config = SimConfig {
            hosts,
            sample_rate,
            quantization: self.quantization.unwrap_or_default(),
            gamma: self.gamma.unwrap_or(0.0),
            coupling_gain,
            sampling_factor: self.sampling_factor.unwrap_or(DEFAULT_SAMPLING_FACTOR),
            pulse_budget: self.pulses.unwrap_or(DEFAULT_PULSE_BUDGET),
            vector_cadence: self.vector_cadence.unwrap_or(DEFAULT_VECTOR_CADENCE),
            rng_seed: self.seed.unwrap_or(0),
        };
        validate(&config)?;
        Ok(config)
    }
}

fn config_error(key: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.into(),
        message: message.into(),
    }
}

/// Validates `config`, reporting failures under their JSON key names.
pub fn validate(config: &SimConfig) -> Result<(), CliError> {
    config.validate().map_err(|e| {
        let key = match &e {
            ConfigError::TooFewHosts(_) => "hosts".to_string(),
            ConfigError::InvalidDuration { host, .. } => format!("hosts[{host}].duration_ns"),
            ConfigError::InvalidStart { host, .. } => format!("hosts[{host}].start_ns"),
            ConfigError::InvalidPosition { host } => format!("hosts[{host}].position_m"),
            ConfigError::InvalidSampleRate => "sampling_hz".into(),
            ConfigError::InvalidGamma(_) => "gamma".into(),
            ConfigError::InvalidCouplingGain(_) => "coupling_gain_hz".into(),
            ConfigError::InvalidSamplingFactor => "sampling_factor".into(),
            ConfigError::InvalidPulseBudget(_) => "pulses".into(),
            ConfigError::InvalidVectorCadence => "vector_cadence".into(),
            ConfigError::UnknownScenario(_) => "scenario".into(),
        };
        config_error(key, e.to_string())
    })
}

/// Parses a JSON document into a validated configuration.
pub fn parse_config_str(text: &str) -> Result<SimConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let file: ConfigFile = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { "<document>".to_string() } else { path };
        config_error(key, e.into_inner().to_string())
    })?;
    file.into_config()
}

pub fn parse_config(path: &Path) -> Result<SimConfig, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

pub fn config_to_json(config: &SimConfig) -> String {
    serde_json::to_string_pretty(&ConfigFile::from_config(config))
        .expect("config file serialization cannot fail")
}
