//! Per-host synchronization state machine.
//!
//! Each host keeps a P×P matrix of effective phase differences. Column `q`
//! holds host `q`'s own measurements of every peer and is refreshed on each
//! pulse reception; column `p ≠ q` is whatever host `p` last broadcast. From
//! this matrix and the per-peer pulse duration estimates the host derives the
//! duration of its next pulse in two stages:
//!
//! 1. a base frequency: the mean estimated peer frequency, pulled towards a
//!    fixed anchor frequency by a small gain `γ` so the network cannot drift
//!    jointly;
//! 2. a Kuramoto correction `-(K/P) Σ_p sin(Δ'[p][q])` on the skew-symmetric
//!    (start-time) part `Δ' = (Δ - Δᵀ)/2` of the matrix.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::localization::{self, DelayMatrix, LocalizationError, MdsEmbedding};
use crate::pulse::HostId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodeError {
    #[error("{host} cannot receive its own pulse")]
    SelfReception { host: HostId },
    #[error("{host}: peer index {peer} out of range for {hosts} hosts")]
    UnknownPeer { host: HostId, peer: usize, hosts: usize },
    #[error("{host}: reception from {peer} at {rx_time:e} s precedes previous reception at {previous:e} s")]
    ProtocolOrder {
        host: HostId,
        peer: HostId,
        rx_time: f64,
        previous: f64,
    },
    #[error("phase vector has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
    #[error("{host}: no pulse duration estimate for {peer} yet")]
    MissingDurationEstimate { host: HostId, peer: HostId },
    #[error("{host}: non-positive duration estimate {value:e} s for {peer}")]
    NonPositiveDuration { host: HostId, peer: HostId, value: f64 },
    #[error("{host}: next pulse frequency {denominator:e} Hz is not positive (coupling gain too large?)")]
    Divergence { host: HostId, denominator: f64 },
}

/// Tuning shared by every host of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncParams {
    /// Drift penalty gain `γ` towards the anchor frequency.
    pub gamma: f64,
    /// Second-stage coupling gain `K`, Hz.
    pub coupling_gain: f64,
    /// Sampling factor `S`: one effective phase cycle spans `S` pulses.
    pub sampling_factor: u32,
}

/// P×P matrix of effective phase differences, radians. Entry `(p, q)` is host
/// `q`'s measurement of host `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiffMatrix(DMatrix<f64>);

impl PhaseDiffMatrix {
    pub fn zeros(hosts: usize) -> Self {
        Self(DMatrix::zeros(hosts, hosts))
    }

    /// Wraps a square matrix, zeroing its diagonal.
    pub fn from_matrix(mut m: DMatrix<f64>) -> Self {
        assert!(m.is_square(), "phase difference matrix must be square");
        m.fill_diagonal(0.0);
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        self.0.column(col).iter().copied().collect()
    }

    fn set(&mut self, row: usize, col: usize, value: f64) {
        if row != col {
            self.0[(row, col)] = value;
        }
    }

    fn set_column(&mut self, col: usize, values: &[f64]) {
        for (row, &v) in values.iter().enumerate() {
            self.0[(row, col)] = v;
        }
        self.0[(col, col)] = 0.0;
    }
}

/// One host's measured column, as broadcast to its peers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseVector {
    pub sender: HostId,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WireError {
    #[error("phase vector frame truncated: {0} bytes")]
    Truncated(usize),
    #[error("phase vector frame has {got} bytes, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("value does not fit the 16-bit wire field: {0}")]
    Overflow(usize),
}

impl PhaseVector {
    /// Encodes as `sender: u16 LE, len: u16 LE, len × f64 LE`.
    pub fn to_bytes(&self) -> Result<Vec<u8>, WireError> {
        let sender = u16::try_from(self.sender.0).map_err(|_| WireError::Overflow(self.sender.0))?;
        let len = u16::try_from(self.values.len()).map_err(|_| WireError::Overflow(self.values.len()))?;
        let mut out = Vec::with_capacity(4 + 8 * self.values.len());
        out.extend_from_slice(&sender.to_le_bytes());
        out.extend_from_slice(&len.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, WireError> {
        if bytes.len() < 4 {
            return Err(WireError::Truncated(bytes.len()));
        }
        let sender = u16::from_le_bytes([bytes[0], bytes[1]]) as usize;
        let len = u16::from_le_bytes([bytes[2], bytes[3]]) as usize;
        let expected = 4 + 8 * len;
        if bytes.len() != expected {
            return Err(WireError::Length {
                expected,
                got: bytes.len(),
            });
        }
        let values = bytes[4..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Ok(Self {
            sender: HostId(sender),
            values,
        })
    }
}

/// Full algorithm state of one host.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeState {
    host: HostId,
    hosts: usize,
    params: SyncParams,
    initial_duration: f64,
    /// Index of the pulse in flight, `None` before the first transmission.
    current_tx_index: Option<u64>,
    /// Host-visible start of the pulse in flight.
    last_tx_start: f64,
    current_duration: f64,
    next_duration: f64,
    peer_duration_estimates: Vec<Option<f64>>,
    first_duration_estimates: Vec<Option<f64>>,
    last_rx_time: Vec<Option<f64>>,
    rx_pulse_count: Vec<u64>,
    phase_matrix: PhaseDiffMatrix,
    measured: Vec<bool>,
    column_received: Vec<bool>,
    anchor_frequency: Option<f64>,
}

impl NodeState {
    pub fn new(host: HostId, hosts: usize, params: SyncParams, initial_duration: f64) -> Self {
        assert!(hosts >= 2, "need at least two hosts");
        assert!(host.0 < hosts, "{host} out of range");
        assert!(params.sampling_factor >= 1, "sampling factor must be at least 1");
        let mut peer_duration_estimates = vec![None; hosts];
        peer_duration_estimates[host.0] = Some(initial_duration);
        let mut first_duration_estimates = vec![None; hosts];
        first_duration_estimates[host.0] = Some(initial_duration);
        let mut measured = vec![false; hosts];
        measured[host.0] = true;
        let mut column_received = vec![false; hosts];
        column_received[host.0] = true;
        Self {
            host,
            hosts,
            params,
            initial_duration,
            current_tx_index: None,
            last_tx_start: 0.0,
            current_duration: initial_duration,
            next_duration: initial_duration,
            peer_duration_estimates,
            first_duration_estimates,
            last_rx_time: vec![None; hosts],
            rx_pulse_count: vec![0; hosts],
            phase_matrix: PhaseDiffMatrix::zeros(hosts),
            measured,
            column_received,
            anchor_frequency: None,
        }
    }

    pub fn host(&self) -> HostId {
        self.host
    }

    pub fn hosts(&self) -> usize {
        self.hosts
    }

    pub fn params(&self) -> SyncParams {
        self.params
    }

    pub fn current_tx_index(&self) -> Option<u64> {
        self.current_tx_index
    }

    pub fn last_tx_start(&self) -> f64 {
        self.last_tx_start
    }

    pub fn current_duration(&self) -> f64 {
        self.current_duration
    }

    pub fn next_duration(&self) -> f64 {
        self.next_duration
    }

    pub fn peer_duration_estimate(&self, peer: HostId) -> Option<f64> {
        self.peer_duration_estimates[peer.0]
    }

    pub fn last_rx_time(&self, peer: HostId) -> Option<f64> {
        self.last_rx_time[peer.0]
    }

    pub fn rx_pulse_count(&self, peer: HostId) -> u64 {
        self.rx_pulse_count[peer.0]
    }

    pub fn phase_matrix(&self) -> &PhaseDiffMatrix {
        &self.phase_matrix
    }

    pub fn anchor_frequency(&self) -> Option<f64> {
        self.anchor_frequency
    }

    /// Records the start of a new own pulse. `start` is the host-visible
    /// timestamp, `duration` the length the pulse will actually have.
    pub fn begin_pulse(&mut self, index: u64, start: f64, duration: f64) {
        debug_assert!(duration > 0.0);
        self.current_tx_index = Some(index);
        self.last_tx_start = start;
        self.current_duration = duration;
        self.peer_duration_estimates[self.host.0] = Some(duration);
    }

    fn check_peer(&self, peer: HostId) -> Result<(), NodeError> {
        if peer.0 >= self.hosts {
            return Err(NodeError::UnknownPeer {
                host: self.host,
                peer: peer.0,
                hosts: self.hosts,
            });
        }
        if peer == self.host {
            return Err(NodeError::SelfReception { host: self.host });
        }
        Ok(())
    }

    /// Handles the arrival of a pulse from `peer` at host-visible time `rx_time`.
    ///
    /// Updates the own-column entry `(peer, host)` with
    /// `(2π/S)(ΔN + Δt/T)`, where `ΔN` is own pulse index minus the received
    /// pulse index and `Δt` the reception time relative to the own pulse start.
    /// Receptions before the host's first transmission only feed the duration
    /// estimate.
    pub fn on_pulse_received(&mut self, peer: HostId, rx_time: f64) -> Result<(), NodeError> {
        self.check_peer(peer)?;
        let p = peer.0;
        if let Some(previous) = self.last_rx_time[p] {
            if rx_time < previous {
                return Err(NodeError::ProtocolOrder {
                    host: self.host,
                    peer,
                    rx_time,
                    previous,
                });
            }
        }
        self.rx_pulse_count[p] += 1;
        let rx_index = self.rx_pulse_count[p] - 1;

        if let Some(m) = self.current_tx_index {
            let index_diff = m as i64 - rx_index as i64;
            let time_diff = rx_time - self.last_tx_start;
            let entry = TAU / self.params.sampling_factor as f64
                * (index_diff as f64 + time_diff / self.current_duration);
            self.phase_matrix.set(p, self.host.0, entry);
            self.measured[p] = true;
        }

        if let Some(previous) = self.last_rx_time[p] {
            let estimate = rx_time - previous;
            self.peer_duration_estimates[p] = Some(estimate);
            if self.first_duration_estimates[p].is_none() {
                self.first_duration_estimates[p] = Some(estimate);
                self.try_fix_anchor();
            }
        }
        self.last_rx_time[p] = Some(rx_time);
        Ok(())
    }

    fn try_fix_anchor(&mut self) {
        if self.anchor_frequency.is_some() {
            return;
        }
        let firsts: Option<Vec<f64>> = self.first_duration_estimates.iter().copied().collect();
        if let Some(firsts) = firsts {
            let mean = firsts.iter().map(|t| 1.0 / t).sum::<f64>() / self.hosts as f64;
            self.anchor_frequency = Some(mean);
        }
    }

    /// Replaces the sender's column with its broadcast measurements.
    pub fn on_phase_vector_received(&mut self, v: &PhaseVector) -> Result<(), NodeError> {
        self.check_peer(v.sender)?;
        if v.values.len() != self.hosts {
            return Err(NodeError::Shape {
                expected: self.hosts,
                got: v.values.len(),
            });
        }
        self.phase_matrix.set_column(v.sender.0, &v.values);
        self.column_received[v.sender.0] = true;
        Ok(())
    }

    /// The host's own measurements of all peers (its column of the matrix).
    pub fn own_phase_vector(&self) -> PhaseVector {
        PhaseVector {
            sender: self.host,
            values: self.phase_matrix.column(self.host.0),
        }
    }

    /// True once a duration estimate exists for every peer.
    pub fn has_all_duration_estimates(&self) -> bool {
        self.peer_duration_estimates.iter().all(Option::is_some)
    }

    /// True once every column of the matrix carries data.
    pub fn matrix_complete(&self) -> bool {
        self.measured.iter().all(|&b| b) && self.column_received.iter().all(|&b| b)
    }

    /// First Kuramoto stage: mean estimated frequency with drift penalty.
    /// The penalty is inactive until the anchor frequency is fixed.
    pub fn compute_base_frequency(&self) -> Result<f64, NodeError> {
        let mut sum = 0.0;
        for (p, estimate) in self.peer_duration_estimates.iter().enumerate() {
            let t = estimate.ok_or(NodeError::MissingDurationEstimate {
                host: self.host,
                peer: HostId(p),
            })?;
            if t.is_nan() || t <= 0.0 {
                return Err(NodeError::NonPositiveDuration {
                    host: self.host,
                    peer: HostId(p),
                    value: t,
                });
            }
            sum += 1.0 / t;
        }
        let mean = sum / self.hosts as f64;
        Ok(match self.anchor_frequency {
            Some(anchor) => mean - self.params.gamma * (mean - anchor),
            None => mean,
        })
    }

    /// Second Kuramoto stage: duration of the next pulse.
    pub fn next_pulse_duration(&self) -> Result<f64, NodeError> {
        let base = self.compute_base_frequency()?;
        let q = self.host.0;
        let coupling: f64 = (0..self.hosts)
            .filter(|&p| p != q)
            .map(|p| {
                let skew = 0.5 * (self.phase_matrix.get(p, q) - self.phase_matrix.get(q, p));
                skew.sin()
            })
            .sum();
        let denominator = base - self.params.coupling_gain / self.hosts as f64 * coupling;
        if !denominator.is_finite() || denominator <= 0.0 {
            return Err(NodeError::Divergence {
                host: self.host,
                denominator,
            });
        }
        Ok(1.0 / denominator)
    }

    /// Fixes the duration of the following pulse. Until every peer's duration
    /// has been estimated the host keeps its current duration.
    pub fn plan_next_duration(&mut self) -> Result<f64, NodeError> {
        let next = if self.has_all_duration_estimates() {
            self.next_pulse_duration()?
        } else {
            self.current_duration
        };
        self.next_duration = next;
        Ok(next)
    }

    /// Pairwise delays implied by the symmetric part of the matrix, scaled by
    /// the host's own current duration.
    pub fn estimate_delays(&self) -> DelayMatrix {
        let parts = localization::decompose(&self.phase_matrix);
        localization::delays_from_symmetric(
            &parts.symmetric,
            self.params.sampling_factor,
            self.current_duration,
        )
    }

    /// Relative 3-D positions of all hosts, once the matrix is complete.
    pub fn estimate_positions(&self) -> Option<Result<MdsEmbedding, LocalizationError>> {
        if !self.matrix_complete() {
            return None;
        }
        Some(localization::classical_mds(&self.estimate_delays(), 3))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params(s: u32) -> SyncParams {
        SyncParams {
            gamma: 0.0,
            coupling_gain: 0.0,
            sampling_factor: s,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-300)
    }

    #[test]
    fn synchronized_zero_delay_gives_zero_entry() {
        let mut n = NodeState::new(HostId(0), 2, params(8), 125e-9);
        n.begin_pulse(0, 10e-9, 125e-9);
        n.on_pulse_received(HostId(1), 10e-9).unwrap();
        assert_eq!(n.phase_matrix().get(1, 0), 0.0);
    }

    #[test]
    fn half_pulse_offset_with_sampling_factor_eight() {
        let t = 125e-9;
        let mut n = NodeState::new(HostId(0), 2, params(8), t);
        n.begin_pulse(0, 0.0, t);
        n.on_pulse_received(HostId(1), t / 2.0).unwrap();
        assert!(close(n.phase_matrix().get(1, 0), PI / 8.0));
    }

    #[test]
    fn one_pulse_ahead_plus_quarter() {
        let t = 1.0;
        let mut n = NodeState::new(HostId(0), 2, params(1), t);
        n.begin_pulse(0, 0.0, t);
        n.begin_pulse(1, 1.0, t);
        // first pulse from the peer: received index 0, own index 1
        n.on_pulse_received(HostId(1), 1.25).unwrap();
        assert!(close(n.phase_matrix().get(1, 0), TAU * 1.25));
    }

    #[test]
    fn receptions_update_counts_and_duration_estimates() {
        let mut n = NodeState::new(HostId(1), 3, params(8), 130e-9);
        n.begin_pulse(0, 0.0, 130e-9);
        n.on_pulse_received(HostId(0), 100e-9).unwrap();
        assert_eq!(n.rx_pulse_count(HostId(0)), 1);
        assert_eq!(n.peer_duration_estimate(HostId(0)), None);
        n.on_pulse_received(HostId(0), 240e-9).unwrap();
        assert_eq!(n.rx_pulse_count(HostId(0)), 2);
        assert!(close(n.peer_duration_estimate(HostId(0)).unwrap(), 140e-9));
        assert_eq!(n.last_rx_time(HostId(0)), Some(240e-9));
    }

    #[test]
    fn out_of_order_reception_is_rejected() {
        let mut n = NodeState::new(HostId(0), 2, params(8), 1.0);
        n.on_pulse_received(HostId(1), 2.0).unwrap();
        assert!(matches!(
            n.on_pulse_received(HostId(1), 1.5),
            Err(NodeError::ProtocolOrder { .. })
        ));
        assert!(matches!(
            n.on_pulse_received(HostId(0), 3.0),
            Err(NodeError::SelfReception { .. })
        ));
    }

    #[test]
    fn vector_replaces_column_and_is_idempotent() {
        let mut n = NodeState::new(HostId(0), 3, params(8), 1.0);
        let v = PhaseVector {
            sender: HostId(2),
            values: vec![0.3, -0.1, 9.0],
        };
        n.on_phase_vector_received(&v).unwrap();
        assert_eq!(n.phase_matrix().column(2), vec![0.3, -0.1, 0.0]);
        let once = n.clone();
        n.on_phase_vector_received(&v).unwrap();
        assert_eq!(n, once);

        let zero = PhaseVector {
            sender: HostId(2),
            values: vec![0.0; 3],
        };
        n.on_phase_vector_received(&zero).unwrap();
        assert_eq!(n.phase_matrix().column(2), vec![0.0; 3]);
    }

    #[test]
    fn vector_of_wrong_length_is_rejected() {
        let mut n = NodeState::new(HostId(0), 3, params(8), 1.0);
        let v = PhaseVector {
            sender: HostId(1),
            values: vec![0.0; 2],
        };
        assert_eq!(
            n.on_phase_vector_received(&v),
            Err(NodeError::Shape { expected: 3, got: 2 })
        );
    }

    #[test]
    fn own_vector_reads_back_measurements() {
        let t = 125e-9;
        let mut q = NodeState::new(HostId(0), 3, params(8), t);
        assert_eq!(q.own_phase_vector().values, vec![0.0; 3]);
        q.begin_pulse(0, 0.0, t);
        q.on_pulse_received(HostId(2), t / 2.0).unwrap();
        let v = q.own_phase_vector();
        assert_eq!(v.sender, HostId(0));
        assert!(close(v.values[2], PI / 8.0));

        let mut r = NodeState::new(HostId(1), 3, params(8), t);
        r.on_phase_vector_received(&v).unwrap();
        assert_eq!(r.phase_matrix().column(0), q.phase_matrix().column(0));
    }

    fn with_estimates(durations: &[f64], gamma: f64) -> NodeState {
        let mut n = NodeState::new(
            HostId(0),
            durations.len(),
            SyncParams {
                gamma,
                coupling_gain: 0.0,
                sampling_factor: 8,
            },
            durations[0],
        );
        for (p, &d) in durations.iter().enumerate() {
            n.peer_duration_estimates[p] = Some(d);
        }
        n
    }

    #[test]
    fn base_frequency_of_identical_durations() {
        let n = with_estimates(&[125e-9; 4], 0.0);
        assert!(close(n.compute_base_frequency().unwrap(), 8e6));
    }

    #[test]
    fn base_frequency_of_initial_durations() {
        let n = with_estimates(&[1.0 / 7.0e6, 1.0 / 8.0e6, 1.0 / 7.3e6, 1.0 / 7.6e6], 0.0);
        assert!(close(n.compute_base_frequency().unwrap(), 7.475e6));
    }

    #[test]
    fn penalty_vanishes_at_anchor() {
        let mut n = with_estimates(&[125e-9, 130e-9], 0.3);
        let mean = (1.0 / 125e-9 + 1.0 / 130e-9) / 2.0;
        n.anchor_frequency = Some(mean);
        assert!(close(n.compute_base_frequency().unwrap(), mean));
    }

    #[test]
    fn penalty_pulls_towards_anchor() {
        let mut n = with_estimates(&[125e-9, 125e-9], 0.05);
        n.anchor_frequency = Some(7.9e6);
        assert!(n.compute_base_frequency().unwrap() < 8e6);
        n.anchor_frequency = Some(8.1e6);
        assert!(n.compute_base_frequency().unwrap() > 8e6);
    }

    #[test]
    fn missing_or_bad_estimate_is_a_domain_error() {
        let n = NodeState::new(HostId(0), 2, params(8), 1.0);
        assert!(matches!(
            n.compute_base_frequency(),
            Err(NodeError::MissingDurationEstimate { .. })
        ));
        let n = with_estimates(&[1.0, 0.0], 0.0);
        assert!(matches!(
            n.compute_base_frequency(),
            Err(NodeError::NonPositiveDuration { .. })
        ));
    }

    #[test]
    fn symmetric_matrix_yields_base_period() {
        let mut n = with_estimates(&[142.86e-9, 125e-9, 136.99e-9, 131.58e-9], 0.0);
        n.params.coupling_gain = 1e5;
        let mut m = DMatrix::from_fn(4, 4, |i, j| ((i + 1) * (j + 1)) as f64 * 0.1);
        m = &m + m.transpose();
        n.phase_matrix = PhaseDiffMatrix::from_matrix(m);
        let base = n.compute_base_frequency().unwrap();
        assert_eq!(n.next_pulse_duration().unwrap(), 1.0 / base);
    }

    #[test]
    fn zero_matrix_with_initial_durations() {
        let n = with_estimates(&[1.0 / 7.0e6, 1.0 / 8.0e6, 1.0 / 7.3e6, 1.0 / 7.6e6], 0.0);
        let d = n.next_pulse_duration().unwrap();
        assert!(close(d, 1.0 / 7.475e6));
        assert!((d - 133.78e-9).abs() < 0.005e-9);
    }

    #[test]
    fn coupling_term_shifts_frequency() {
        let mut n = with_estimates(&[125e-9, 125e-9], 0.0);
        // K/P · sin(π/6) = 4 kHz / 2 · 0.5 = 1 kHz
        n.params.coupling_gain = 4e3;
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = PI / 3.0;
        n.phase_matrix = PhaseDiffMatrix::from_matrix(m);
        let d = n.next_pulse_duration().unwrap();
        assert!((d - 1.0 / 7.999e6).abs() <= 1e-12 * d);
    }

    #[test]
    fn excessive_gain_diverges() {
        let mut n = with_estimates(&[125e-9, 125e-9], 0.0);
        n.params.coupling_gain = 1e9;
        let mut m = DMatrix::zeros(2, 2);
        m[(1, 0)] = 1.0;
        n.phase_matrix = PhaseDiffMatrix::from_matrix(m);
        assert!(matches!(
            n.next_pulse_duration(),
            Err(NodeError::Divergence { .. })
        ));
    }

    #[test]
    fn anchor_fixed_after_second_reception_from_every_peer() {
        let mut n = NodeState::new(HostId(0), 2, params(8), 100e-9);
        n.on_pulse_received(HostId(1), 10e-9).unwrap();
        assert_eq!(n.anchor_frequency(), None);
        n.on_pulse_received(HostId(1), 135e-9).unwrap();
        let expected = (1.0 / 100e-9 + 1.0 / 125e-9) / 2.0;
        assert!(close(n.anchor_frequency().unwrap(), expected));
        n.on_pulse_received(HostId(1), 300e-9).unwrap();
        assert!(close(n.anchor_frequency().unwrap(), expected));
    }

    #[test]
    fn plan_keeps_duration_until_estimates_exist() {
        let mut n = NodeState::new(HostId(0), 2, params(8), 100e-9);
        n.begin_pulse(0, 0.0, 100e-9);
        assert_eq!(n.plan_next_duration().unwrap(), 100e-9);
    }

    #[test]
    fn wire_format_layout() {
        let v = PhaseVector {
            sender: HostId(3),
            values: vec![1.5, -0.25],
        };
        let bytes = v.to_bytes().unwrap();
        assert_eq!(bytes.len(), 4 + 16);
        assert_eq!(&bytes[..4], &[3, 0, 2, 0]);
        assert_eq!(&bytes[4..12], &1.5f64.to_le_bytes());
        assert_eq!(PhaseVector::from_bytes(&bytes).unwrap(), v);
        assert_eq!(
            PhaseVector::from_bytes(&bytes[..11]),
            Err(WireError::Length { expected: 20, got: 11 })
        );
    }
}
