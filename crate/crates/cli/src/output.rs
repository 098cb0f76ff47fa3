//! CSV series and the run manifest.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value re-reads to the identical `f64`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use kls_core::metrics::{
    frequency_offset, instantaneous_frequency, position_error_series, start_time_error_series,
    true_positions,
};
use kls_core::sim::ScenarioTrace;
use kls_core::HostId;
use serde::Serialize;

use crate::config::ConfigFile;
use crate::CliError;

pub const PULSES_CSV: &str = "pulses.csv";
pub const FREQUENCY_CSV: &str = "frequency.csv";
pub const START_TIME_ERROR_CSV: &str = "start_time_error.csv";
pub const POSITION_ERROR_CSV: &str = "position_error.csv";
pub const DELAYS_CSV: &str = "delays.csv";
pub const MANIFEST_JSON: &str = "manifest.json";

/// Files written by a successful run, in write order.
pub const OUTPUT_FILES: [&str; 6] = [
    PULSES_CSV,
    FREQUENCY_CSV,
    START_TIME_ERROR_CSV,
    POSITION_ERROR_CSV,
    DELAYS_CSV,
    MANIFEST_JSON,
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub artifact: &'static str,
    pub version: &'static str,
    pub label: String,
    pub config: ConfigFile,
    pub f_ref_hz: f64,
    pub files: Vec<String>,
    pub runtime_s: f64,
}

pub fn pulses_csv(trace: &ScenarioTrace) -> String {
    let mut out = String::from("host,index,start_s,duration_s\n");
    for (h, pulses) in trace.pulses.iter().enumerate() {
        for p in pulses {
            let _ = writeln!(out, "{h},{},{},{}", p.index, p.start, p.duration);
        }
    }
    out
}

pub fn frequency_csv(trace: &ScenarioTrace, f_ref: f64) -> String {
    let mut out = String::from("host,index,time_s,frequency_hz,offset_hz\n");
    for h in 0..trace.host_count() {
        let f = instantaneous_frequency(trace, HostId(h));
        for (p, o) in f.iter().zip(frequency_offset(&f, f_ref)) {
            let _ = writeln!(out, "{h},{},{},{},{}", p.index, p.time, p.value, o.value);
        }
    }
    out
}

pub fn start_time_error_csv(trace: &ScenarioTrace) -> String {
    let mut out = String::from("host,index,time_s,error_s\n");
    for h in 0..trace.host_count() {
        for p in start_time_error_series(trace, HostId(h)) {
            let _ = writeln!(out, "{h},{},{},{}", p.index, p.time, p.value);
        }
    }
    out
}

pub fn position_error_csv(trace: &ScenarioTrace) -> String {
    let truth = true_positions(trace);
    let mut out = String::from("host,index,time_s,relative_error\n");
    for h in 0..trace.host_count() {
        for p in position_error_series(trace, HostId(h), &truth) {
            let _ = writeln!(out, "{h},{},{},{}", p.index, p.time, p.value);
        }
    }
    out
}

/// Final delay matrix estimated by each host, one entry per row.
pub fn delays_csv(trace: &ScenarioTrace) -> String {
    let mut out = String::from("host,row,col,delay_s\n");
    for (h, delays) in trace.final_delays().into_iter().enumerate() {
        let Some(d) = delays else { continue };
        for r in 0..d.dim() {
            for c in 0..d.dim() {
                let _ = writeln!(out, "{h},{r},{c},{}", d.get(r, c));
            }
        }
    }
    out
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io { path, source })
}

/// Writes all series plus the manifest into `dir`, creating it if needed.
pub fn write_outputs(
    dir: &Path,
    trace: &ScenarioTrace,
    label: &str,
    f_ref: f64,
    runtime_s: f64,
) -> Result<RunManifest, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: PathBuf::from(dir),
        source,
    })?;
    write(dir, PULSES_CSV, &pulses_csv(trace))?;
    write(dir, FREQUENCY_CSV, &frequency_csv(trace, f_ref))?;
    write(dir, START_TIME_ERROR_CSV, &start_time_error_csv(trace))?;
    write(dir, POSITION_ERROR_CSV, &position_error_csv(trace))?;
    write(dir, DELAYS_CSV, &delays_csv(trace))?;

    let manifest = RunManifest {
        artifact: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        label: label.to_string(),
        config: ConfigFile::from_config(&trace.config),
        f_ref_hz: f_ref,
        files: OUTPUT_FILES.iter().map(|s| s.to_string()).collect(),
        runtime_s,
    };
    let mut json = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
    json.push('\n');
    write(dir, MANIFEST_JSON, &json)?;
    Ok(manifest)
}
