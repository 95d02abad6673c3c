//! Run configuration: one JSON document per run.
//!
//! Only `command` and `seed` are required; every parameter block falls back
//! to documented defaults and unknown keys are rejected at every level.

use std::path::PathBuf;

use clap::ValueEnum;
use coordsim_core::chaos::{MapSpec, DEFAULT_BURN_IN, MIN_LYAPUNOV_ITERATES};
use coordsim_core::coord::{
    Condition, ExperimentDesign, HkbParams, SpringParams, TemperatureProtocol,
};
use coordsim_core::flock::{FlockParams, NUMERIC_PARAMS};
use coordsim_core::Error;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandKind {
    Flock,
    Hkb,
    Experiment,
    Entropy,
    Chaos,
    Sweep,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Flock => "flock",
            CommandKind::Hkb => "hkb",
            CommandKind::Experiment => "experiment",
            CommandKind::Entropy => "entropy",
            CommandKind::Chaos => "chaos",
            CommandKind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
    /// Whitespace-separated columns under a `#` header line, for gnuplot.
    Dat,
}

/// Integration settings for the `hkb` command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhaseOptions {
    pub phi0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Default for PhaseOptions {
    fn default() -> Self {
        PhaseOptions {
            phi0: 0.0,
            dt: 0.005,
            steps: 12_000,
        }
    }
}

/// Optional damped-spring run emitted alongside the `hkb` output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpringOptions {
    pub m: f64,
    pub b: f64,
    pub k: f64,
    pub x0: f64,
    pub v0: f64,
    pub dt: f64,
    pub steps: usize,
}

impl Default for SpringOptions {
    fn default() -> Self {
        let p = SpringParams::default();
        SpringOptions {
            m: p.m,
            b: p.b,
            k: p.k,
            x0: 1.0,
            v0: -1.0,
            dt: 1e-4,
            steps: 50_000,
        }
    }
}

impl SpringOptions {
    pub fn params(&self) -> SpringParams {
        SpringParams {
            m: self.m,
            b: self.b,
            k: self.k,
        }
    }
}

/// Input for the `entropy` command: either a probability list or a CSV
/// file holding a phase column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EntropyOptions {
    pub probs: Option<Vec<f64>>,
    pub renormalize: bool,
    pub series_csv: Option<PathBuf>,
    pub column: String,
    pub bins: usize,
    /// Intended phase for the circular statistics of a series.
    pub phi0: f64,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            probs: None,
            renormalize: false,
            series_csv: None,
            column: "phi_radians".into(),
            bins: coordsim_core::analysis::DEFAULT_BINS,
            phi0: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChaosOptions {
    pub r: Vec<f64>,
    pub x0: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Initial separation for the orbit-divergence trace and the twin-orbit
    /// estimator.
    pub epsilon0: f64,
    pub divergence_steps: usize,
}

impl Default for ChaosOptions {
    fn default() -> Self {
        ChaosOptions {
            r: vec![2.5, 3.2, 3.9, 4.0],
            x0: 0.3,
            iterations: 1_000_000,
            burn_in: DEFAULT_BURN_IN,
            epsilon0: 1e-9,
            divergence_steps: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepOptions {
    /// Serialized name of a numeric flock parameter.
    pub axis: String,
    pub grid: Vec<f64>,
    pub replicates: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            axis: "t_ties".into(),
            grid: (0..17).map(|i| (10 + 5 * i) as f64 / 100.0).collect(),
            replicates: 2,
        }
    }
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_steps() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub flock: FlockParams,
    /// Flock steps per run (`flock` and `sweep`).
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub hkb: HkbParams,
    #[serde(default)]
    pub phase: PhaseOptions,
    #[serde(default)]
    pub spring: Option<SpringOptions>,
    #[serde(default)]
    pub temperature: TemperatureProtocol,
    #[serde(default)]
    pub experiment: ExperimentDesign,
    /// Second condition to run against `experiment.condition`, adding a
    /// condition × hour ANOVA.
    #[serde(default)]
    pub compare: Option<Condition>,
    /// Also write every experiment phase sample (large).
    #[serde(default)]
    pub write_series: bool,
    #[serde(default)]
    pub entropy: EntropyOptions,
    #[serde(default)]
    pub chaos: ChaosOptions,
    #[serde(default)]
    pub sweep: SweepOptions,
}

fn section(name: &str) -> impl FnOnce(Error) -> HarnessError + '_ {
    move |e| HarnessError::Config(format!("{name}: {}", e.root()))
}

fn config_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

impl RunConfig {
    /// A config with every block at its defaults.
    pub fn new(command: CommandKind, seed: u64) -> Self {
        RunConfig {
            command,
            seed,
            output_dir: default_output_dir(),
            format: Format::default(),
            flock: FlockParams::default(),
            steps: default_steps(),
            hkb: HkbParams::default(),
            phase: PhaseOptions::default(),
            spring: None,
            temperature: TemperatureProtocol::default(),
            experiment: ExperimentDesign::default(),
            compare: None,
            write_series: false,
            entropy: EntropyOptions::default(),
            chaos: ChaosOptions::default(),
            sweep: SweepOptions::default(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Checks every block against the ranges of its owning type, plus the
    /// inputs the selected command needs.
    pub fn validate(&self) -> Result<(), HarnessError> {
        self.flock.validate().map_err(section("flock"))?;
        if self.steps == 0 {
            return Err(config_err("steps must be at least 1"));
        }
        self.hkb.validate().map_err(section("hkb"))?;
        let ph = &self.phase;
        if !(ph.dt > 0.0 && ph.dt.is_finite()) || ph.steps == 0 || !ph.phi0.is_finite() {
            return Err(config_err(
                "phase: dt must be positive, steps at least 1 and phi0 finite",
            ));
        }
        if let Some(spring) = &self.spring {
            spring.params().validate().map_err(section("spring"))?;
            if !(spring.dt > 0.0) || spring.steps == 0 {
                return Err(config_err(
                    "spring: dt must be positive and steps at least 1",
                ));
            }
        }
        self.temperature
            .validate()
            .map_err(section("temperature"))?;
        self.experiment.validate().map_err(section("experiment"))?;
        self.validate_entropy()?;
        self.validate_chaos()?;
        self.validate_sweep()
    }

    fn validate_entropy(&self) -> Result<(), HarnessError> {
        let e = &self.entropy;
        if e.bins < 2 {
            return Err(config_err(format!(
                "entropy.bins = {} must be at least 2",
                e.bins
            )));
        }
        if self.command == CommandKind::Entropy && e.probs.is_some() == e.series_csv.is_some() {
            return Err(config_err(
                "entropy: give exactly one of entropy.probs or entropy.series_csv",
            ));
        }
        Ok(())
    }

    fn validate_chaos(&self) -> Result<(), HarnessError> {
        let c = &self.chaos;
        for &r in &c.r {
            MapSpec::new(r).map_err(section("chaos.r"))?;
        }
        if !(0.0..=1.0).contains(&c.x0) {
            return Err(config_err(format!("chaos.x0 = {} is outside [0, 1]", c.x0)));
        }
        if c.iterations < MIN_LYAPUNOV_ITERATES {
            return Err(config_err(format!(
                "chaos.iterations = {} must be at least {MIN_LYAPUNOV_ITERATES}",
                c.iterations
            )));
        }
        if !(c.epsilon0 > 0.0 && c.x0 + c.epsilon0 <= 1.0) {
            return Err(config_err(
                "chaos.epsilon0 must be positive with x0 + epsilon0 <= 1",
            ));
        }
        if c.divergence_steps == 0 {
            return Err(config_err("chaos.divergence_steps must be at least 1"));
        }
        Ok(())
    }

    fn validate_sweep(&self) -> Result<(), HarnessError> {
        let s = &self.sweep;
        if !NUMERIC_PARAMS.contains(&s.axis.as_str()) {
            return Err(config_err(format!(
                "sweep.axis `{}` is not a numeric flock parameter (expected one of {})",
                s.axis,
                NUMERIC_PARAMS.join(", ")
            )));
        }
        if s.grid.is_empty() || s.replicates == 0 {
            return Err(config_err(
                "sweep: grid must be non-empty and replicates at least 1",
            ));
        }
        for &value in &s.grid {
            let mut p = self.flock.clone();
            p.set_numeric(&s.axis, value)
                .and_then(|_| p.validate())
                .map_err(|e| config_err(format!("sweep.grid value {value}: {}", e.root())))?;
        }
        Ok(())
    }
}

/// Parses and validates a JSON run config.
pub fn parse_config(text: &str) -> Result<RunConfig, HarnessError> {
    let cfg: RunConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = parse_config(r#"{"seed": 1, "command": "flock"}"#).unwrap();
        assert_eq!(cfg, RunConfig::new(CommandKind::Flock, 1));
        assert_eq!(cfg.flock.population, 1000);
    }

    #[test]
    fn range_errors_name_key_and_interval() {
        let err =
            parse_config(r#"{"seed": 1, "command": "flock", "flock": {"k": 1.5}}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("k = 1.5") && msg.contains("[0, 1]"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_keys_and_type_mismatches() {
        let err = parse_config(r#"{"seed": 1, "command": "flock", "flok": {}}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field `flok`"));
        let err =
            parse_config(r#"{"seed": 1, "command": "hkb", "hkb": {"a": "big"}}"#).unwrap_err();
        assert!(err.to_string().contains("invalid type"));
        assert!(parse_config(r#"{"command": "flock"}"#)
            .unwrap_err()
            .to_string()
            .contains("seed"));
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::new(CommandKind::Experiment, 77);
        cfg.compare = Some(Condition::Heat);
        cfg.spring = Some(SpringOptions::default());
        cfg.sweep.grid = vec![0.2, 0.4];
        let back = parse_config(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(parse_config(&back.to_json()).unwrap(), back);
    }

    #[test]
    fn command_specific_checks() {
        assert!(parse_config(r#"{"seed": 1, "command": "entropy"}"#).is_err());
        assert!(parse_config(
            r#"{"seed": 1, "command": "entropy", "entropy": {"probs": [0.5, 0.5]}}"#
        )
        .is_ok());
        let err = parse_config(r#"{"seed": 1, "command": "sweep", "sweep": {"axis": "colour"}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = parse_config(
            r#"{"seed": 1, "command": "sweep", "sweep": {"axis": "k", "grid": [2.0]}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("k = 2"));
        assert!(parse_config(r#"{"seed": 1, "command": "chaos", "chaos": {"r": [5.0]}}"#).is_err());
    }
}
