//! Command-line front end: picks a scenario (built-in preset or JSON file),
//! applies flag overrides, runs it and writes plot-ready CSV series.
//!
//! Precedence, lowest to highest: built-in preset (`--scenario`, default A)
//! or config file (`--config`), then individual flags.

pub mod config;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{CommandFactory, Parser};
use kls_core::metrics::default_reference_frequency;
use kls_core::sim::{run_scenario, scenario_preset, Scenario, SimConfig, SimError};
use kls_core::SampleRate;
use thiserror::Error;

pub use config::{config_to_json, parse_config, parse_config_str};
pub use output::RunManifest;

/// Environment variable naming the default output root.
pub const OUT_DIR_ENV: &str = "KLS_OUT_DIR";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("cannot read config {}: {source}", path.display())]
    ConfigRead {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("simulation diverged: {0}")]
    Divergence(SimError),
    #[error("simulation failed: {0}")]
    Simulation(SimError),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::ConfigRead { .. } => 2,
            CliError::Divergence(_) => 3,
            CliError::Simulation(_) | CliError::Io { .. } => 1,
        }
    }
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    s.parse::<Scenario>().map_err(|e| e.to_string())
}

fn parse_sample_rate(s: &str) -> Result<SampleRate, String> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(SampleRate::Infinite);
    }
    s.parse::<f64>()
        .map(SampleRate::Hz)
        .map_err(|_| format!("expected a frequency in Hz or \"inf\", got \"{s}\""))
}

#[derive(Debug, Clone, Parser)]
#[command(name = "kls", version, about = "Run a synchronization/localization scenario and emit CSV traces")]
pub struct Cli {
    /// Built-in scenario: A (infinite sampling), B (800 MHz), C (800 MHz + drift compensation)
    #[arg(long, value_parser = parse_scenario, conflicts_with = "config")]
    pub scenario: Option<Scenario>,
    /// JSON scenario file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory [default: $KLS_OUT_DIR/<label> or runs/<label>]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Pulses per host
    #[arg(long)]
    pub pulses: Option<u64>,
    /// Seed for the sampling grid offsets
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub coupling_gain_hz: Option<f64>,
    /// Drift compensation gain
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Sampling rate in Hz, or "inf"
    #[arg(long, value_parser = parse_sample_rate)]
    pub fs_hz: Option<SampleRate>,
    #[arg(long)]
    pub sampling_factor: Option<u32>,
    #[arg(long)]
    pub vector_cadence: Option<u32>,
    /// Reference for frequency offsets [default: host 0's anchor frequency]
    #[arg(long)]
    pub f_ref_hz: Option<f64>,
}

impl Cli {
    /// Label used for the default output directory.
    pub fn label(&self) -> String {
        match (&self.config, self.scenario) {
            (Some(path), _) => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "config".into()),
            (None, s) => format!("scenario-{}", s.unwrap_or(Scenario::A).name().to_lowercase()),
        }
    }

    pub fn resolve_config(&self) -> Result<SimConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => parse_config(path)?,
            None => scenario_preset(self.scenario.unwrap_or(Scenario::A)),
        };
        if let Some(v) = self.pulses {
            c.pulse_budget = v;
        }
        if let Some(v) = self.seed {
            c.rng_seed = v;
        }
        if let Some(v) = self.coupling_gain_hz {
            c.coupling_gain = v;
        }
        if let Some(v) = self.gamma {
            c.gamma = v;
        }
        if let Some(v) = self.fs_hz {
            c.sample_rate = v;
        }
        if let Some(v) = self.sampling_factor {
            c.sampling_factor = v;
        }
        if let Some(v) = self.vector_cadence {
            c.vector_cadence = v;
        }
        config::validate(&c)?;
        Ok(c)
    }

    pub fn out_dir(&self) -> PathBuf {
        if let Some(out) = &self.out {
            return out.clone();
        }
        let root = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("runs"));
        root.join(self.label())
    }
}

pub fn run(cli: &Cli) -> Result<(PathBuf, RunManifest), CliError> {
    let config = cli.resolve_config()?;
    let started = Instant::now();
    let trace = run_scenario(&config).map_err(|e| match e {
        SimError::Config(c) => CliError::Config {
            key: "config".into(),
            message: c.to_string(),
        },
        e @ SimError::Divergence { .. } => CliError::Divergence(e),
        e => CliError::Simulation(e),
    })?;
    let runtime_s = started.elapsed().as_secs_f64();
    let f_ref = cli
        .f_ref_hz
        .unwrap_or_else(|| default_reference_frequency(&trace));
    let dir = cli.out_dir();
    let manifest = output::write_outputs(&dir, &trace, &cli.label(), f_ref, runtime_s)?;
    Ok((dir, manifest))
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            let usage = Cli::command().render_usage().to_string();
            if !e.to_string().contains(&usage) {
                eprintln!("\n{usage}");
            }
            return 2;
        }
    };
    match run(&cli) {
        Ok((dir, manifest)) => {
            println!(
                "wrote {} files to {} in {:.3} s",
                manifest.files.len(),
                dir.display(),
                manifest.runtime_s
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
