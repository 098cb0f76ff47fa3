//! Timestamp quantization on per-host sampling grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pulse::HostId;

/// Receiver sampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SampleRate {
    Infinite,
    Hz(f64),
}

impl SampleRate {
    pub fn period(self) -> Option<f64> {
        match self {
            SampleRate::Infinite => None,
            SampleRate::Hz(fs) => Some(1.0 / fs),
        }
    }

    pub fn is_valid(self) -> bool {
        match self {
            SampleRate::Infinite => true,
            SampleRate::Hz(fs) => fs.is_finite() && fs > 0.0,
        }
    }
}

/// Which host-visible instants are snapped to the sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantizationMode {
    /// Reception timestamps and the physical transmit instants both lie on the grid.
    #[default]
    Both,
    /// Only reception timestamps are quantized; pulses start at arbitrary instants.
    RxOnly,
}

/// Sampling rate plus the grid phase of every host's clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingModel {
    pub sample_rate: SampleRate,
    /// Grid offset of each host in `[0, 1/f_s)`; empty for infinite rate.
    pub grid_offsets: Vec<f64>,
}

impl SamplingModel {
    pub fn infinite() -> Self {
        Self {
            sample_rate: SampleRate::Infinite,
            grid_offsets: Vec::new(),
        }
    }

    /// Grid with every host at offset zero.
    pub fn aligned(sample_rate: SampleRate, hosts: usize) -> Self {
        let grid_offsets = match sample_rate {
            SampleRate::Infinite => Vec::new(),
            SampleRate::Hz(_) => vec![0.0; hosts],
        };
        Self {
            sample_rate,
            grid_offsets,
        }
    }

    /// Offsets drawn uniformly from `[0, 1/f_s)` with a seeded generator.
    pub fn seeded(sample_rate: SampleRate, hosts: usize, seed: u64) -> Self {
        let grid_offsets = match sample_rate.period() {
            None => Vec::new(),
            Some(period) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..hosts)
                    .map(|_| rng.gen::<f64>() * period)
                    .map(|o| if o >= period { 0.0 } else { o })
                    .collect()
            }
        };
        Self {
            sample_rate,
            grid_offsets,
        }
    }

    pub fn offset(&self, host: HostId) -> f64 {
        self.grid_offsets.get(host.0).copied().unwrap_or(0.0)
    }
}

/// Snaps `t` to the nearest tick `offset + k/f_s` of the host's grid, rounding
/// half-way cases up in `k`. Identity at infinite rate.
pub fn quantize_time(t: f64, sampling: &SamplingModel, host: HostId) -> f64 {
    match sampling.sample_rate {
        SampleRate::Infinite => t,
        SampleRate::Hz(fs) => {
            let offset = sampling.offset(host);
            let k = ((t - offset) * fs + 0.5).floor();
            offset + k / fs
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_rate_is_identity() {
        let s = SamplingModel::infinite();
        for t in [0.0, 1.9e-9, 123.456e-6, -4.0] {
            assert_eq!(quantize_time(t, &s, HostId(3)), t);
        }
    }

    // Brute-force nearest grid point over a window of neighbours.
    fn nearest_by_search(t: f64, offset: f64, fs: f64) -> f64 {
        let centre = ((t - offset) * fs).floor() as i64;
        let mut best = f64::NAN;
        let mut best_dist = f64::INFINITY;
        for k in centre - 3..=centre + 3 {
            let g = offset + k as f64 / fs;
            let d = (g - t).abs();
            // exact ties go to the later tick
            if d < best_dist || (d == best_dist && g > best) {
                best = g;
                best_dist = d;
            }
        }
        best
    }

    #[test]
    fn example_rounds_to_nearest_tick() {
        let s = SamplingModel::aligned(SampleRate::Hz(800e6), 1);
        let q = quantize_time(1.9e-9, &s, HostId(0));
        assert_eq!(q, nearest_by_search(1.9e-9, 0.0, 800e6));
        assert!((q - 2.5e-9).abs() < 1e-21);
    }

    #[test]
    fn on_grid_is_fixed() {
        let s = SamplingModel::aligned(SampleRate::Hz(800e6), 1);
        for k in [0_i64, 1, 7, 1000, 213_517] {
            let t = k as f64 / 800e6;
            assert_eq!(quantize_time(t, &s, HostId(0)), t);
        }
    }

    #[test]
    fn matches_exhaustive_search_with_offsets() {
        let s = SamplingModel::seeded(SampleRate::Hz(800e6), 4, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let t = rng.gen::<f64>() * 3e-4;
            let h = HostId(rng.gen_range(0..4));
            let q = quantize_time(t, &s, h);
            let b = nearest_by_search(t, s.offset(h), 800e6);
            assert!((q - b).abs() < 1e-18, "{q} vs {b}");
        }
    }

    #[test]
    fn seeded_offsets_lie_inside_one_period() {
        let s = SamplingModel::seeded(SampleRate::Hz(800e6), 64, 0);
        assert_eq!(s.grid_offsets.len(), 64);
        assert!(s.grid_offsets.iter().all(|&o| (0.0..1.25e-9).contains(&o)));
        assert_eq!(s, SamplingModel::seeded(SampleRate::Hz(800e6), 64, 0));
    }
}
