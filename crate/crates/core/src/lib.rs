//! Joint peer-to-peer frequency/phase synchronization and anchor-free relative
//! localization of wireless hosts using a sampled two-stage Kuramoto scheme
//! with drift compensation.
//!
//! - [`pulse`]: pulse schedules, transmit and receive phases
//! - [`geometry`]: positions and propagation delays
//! - [`sampling`]: timestamp quantization
//! - [`node`]: the per-host protocol state machine
//! - [`localization`]: phase-matrix decomposition, MDS and Procrustes
//! - [`sim`]: the discrete-event scenario engine
//! - [`metrics`]: frequency, start-time and position error series

pub mod geometry;
pub mod localization;
pub mod metrics;
pub mod node;
pub mod pulse;
pub mod sampling;
pub mod sim;

pub use geometry::{propagation_delay, Position, PositionSet, SPEED_OF_LIGHT};
pub use node::{NodeError, NodeState, PhaseDiffMatrix, PhaseVector, SyncParams};
pub use pulse::{receive_phase, transmit_phase, HostId, Phase, PulseSchedule};
pub use sampling::{quantize_time, QuantizationMode, SampleRate, SamplingModel};
pub use sim::{run_scenario, scenario_preset, Scenario, ScenarioTrace, SimConfig, SimError};
