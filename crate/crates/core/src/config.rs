//! JSON run configuration.
//!
//! Every key is optional; omitted keys take the reference-setup values, so an
//! empty document is a complete configuration. Quantities are SI unless the
//! key says otherwise (`source_position` and sweep `distances` are in mm).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::air::{AirState, REFERENCE_SOUND_SPEED, REFERENCE_TEMPERATURE};
use crate::error::{ensure, Error, Result};
use crate::experiments::{linspace, AnalyzerSettings, Bench, InteractionLength, SourceSpectrum, SweepSettings};
use crate::interferometer::InterferometerConfig;
use crate::optics::{AcousticScene, GaussianBeam};
use crate::quantum::SqueezerConfig;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub seed: u64,
    pub air: AirSection,
    pub beam: GaussianBeam,
    pub scene: SceneSection,
    pub squeezer: SqueezerConfig,
    pub interferometer: InterferometerConfig,
    pub analysis: AnalysisSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            seed: 0,
            air: AirSection::default(),
            beam: GaussianBeam::default(),
            scene: SceneSection::default(),
            squeezer: SqueezerConfig::default(),
            interferometer: InterferometerConfig::default(),
            analysis: AnalysisSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AirSection {
    /// K.
    pub temperature: f64,
    /// Pa.
    pub static_pressure: f64,
    pub relative_humidity: f64,
    pub co2_fraction: f64,
    /// m/s; `null` scales 343 m/s with `sqrt(T / 293.15)`.
    pub sound_speed: Option<f64>,
}

impl Default for AirSection {
    fn default() -> Self {
        let air = AirState::default();
        AirSection {
            temperature: air.temperature,
            static_pressure: air.static_pressure,
            relative_humidity: air.relative_humidity,
            co2_fraction: air.co2_fraction,
            sound_speed: None,
        }
    }
}

impl AirSection {
    pub fn state(&self) -> AirState {
        let sound_speed = self
            .sound_speed
            .unwrap_or_else(|| REFERENCE_SOUND_SPEED * (self.temperature.max(0.0) / REFERENCE_TEMPERATURE).sqrt());
        AirState {
            temperature: self.temperature,
            static_pressure: self.static_pressure,
            relative_humidity: self.relative_humidity,
            co2_fraction: self.co2_fraction,
            sound_speed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSection {
    /// Hz.
    pub frequency: f64,
    /// Pa at the source face.
    pub source_pressure_amplitude: f64,
    /// Source face to beam axis, mm.
    pub source_position: f64,
    /// rad.
    pub phase_offset: f64,
    /// Fixed interaction length, m; `null` integrates the beam wash-out.
    pub effective_length: Option<f64>,
}

impl Default for SceneSection {
    fn default() -> Self {
        SceneSection {
            frequency: 5.204e6,
            source_pressure_amplitude: 0.4,
            source_position: 0.0,
            phase_offset: 0.0,
            effective_length: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    /// Hz.
    pub rbw: f64,
    /// Hz.
    pub vbw: f64,
    pub n_avg: usize,
    /// Hz.
    pub span: f64,
    /// Hz; `null` centres on the scene frequency.
    pub center: Option<f64>,
    /// Hz.
    pub sample_rate: f64,
    pub guard_bins: usize,
    /// m; `null` calibrates with the forward-model interaction length.
    pub calibration_length: Option<f64>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        let a = AnalyzerSettings::default();
        AnalysisSection {
            rbw: a.rbw,
            vbw: a.vbw,
            n_avg: a.n_avg,
            span: a.span,
            center: None,
            sample_rate: a.sample_rate,
            guard_bins: a.guard_bins,
            calibration_length: a.calibration_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Hz.
    pub frequencies: Vec<f64>,
    /// K.
    pub temperatures: Vec<f64>,
    /// Hz; `null` uses the scene frequency.
    pub temperature_sweep_frequency: Option<f64>,
    /// Source pressure versus frequency as `[Hz, Pa]` pairs.
    pub source_pressure: Vec<(f64, f64)>,
    /// mm.
    pub distances: Vec<f64>,
    pub source_jitter: f64,
    pub quantum_noise: bool,
    pub noise_variance: f64,
    pub min_points: usize,
    pub refine_points: usize,
}

impl Default for SweepSection {
    /// The source output falls steeply above 6 MHz.
    fn default() -> Self {
        let s = SweepSettings::default();
        SweepSection {
            frequencies: vec![4.2e6, 4.8e6, 5.4e6, 6.0e6, 7.2e6],
            temperatures: linspace(291.15, 345.15, 7),
            temperature_sweep_frequency: None,
            source_pressure: vec![(4.2e6, 10.0), (6.0e6, 10.0), (7.2e6, 0.15)],
            distances: s.distances,
            source_jitter: 0.01,
            quantum_noise: s.quantum_noise,
            noise_variance: s.noise_variance,
            min_points: s.min_points,
            refine_points: s.refine_points,
        }
    }
}

impl SweepSection {
    pub fn settings(&self) -> SweepSettings {
        SweepSettings {
            distances: self.distances.clone(),
            source_jitter: self.source_jitter,
            quantum_noise: self.quantum_noise,
            noise_variance: self.noise_variance,
            min_points: self.min_points,
            refine_points: self.refine_points,
        }
    }

    pub fn source(&self) -> SourceSpectrum {
        SourceSpectrum {
            points: self.source_pressure.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        self.settings().validate()?;
        self.source()
            .validate()
            .map_err(|_| Error::invalid("source_pressure", "need increasing frequencies and pressures >= 0"))?;
        for (name, list) in [("frequencies", &self.frequencies), ("temperatures", &self.temperatures)] {
            ensure(!list.is_empty(), name, "must not be empty")?;
            ensure(
                list.iter().all(|v| v.is_finite() && *v > 0.0),
                name,
                "values must be > 0",
            )?;
        }
        if let Some(f) = self.temperature_sweep_frequency {
            ensure(
                f.is_finite() && f > 0.0,
                "temperature_sweep_frequency",
                "must be > 0 Hz",
            )?;
        }
        Ok(())
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        let scene = self.scene();
        scene.validate().map_err(|e| e.within("scene"))?;
        if let Some(z) = self.scene.effective_length {
            ensure(z.is_finite() && z > 0.0, "scene.effective_length", "must be > 0 m")?;
        }
        self.squeezer.validate().map_err(|e| e.within("squeezer"))?;
        self.bench().validate()?;
        ensure(
            (self.beam.power - self.interferometer.input_power).abs() <= 1e-12 * self.interferometer.input_power,
            "beam.power",
            "must equal interferometer.input_power",
        )?;
        if let Some(c) = self.analysis.center {
            ensure(c.is_finite() && c > 0.0, "analysis.center", "must be > 0 Hz")?;
        }
        let top = self.center() + self.analysis.span / 2.0;
        if self.analysis.sample_rate < 4.0 * top {
            return Err(Error::invalid(
                "analysis.sample_rate",
                format!("must be >= 4 x (center + span/2) = {} Hz", 4.0 * top),
            ));
        }
        self.sweep.validate().map_err(|e| e.within("sweep"))
    }

    pub fn air_state(&self) -> AirState {
        self.air.state()
    }

    /// Analyzer centre frequency, Hz.
    pub fn center(&self) -> f64 {
        self.analysis.center.unwrap_or(self.scene.frequency)
    }

    pub fn scene(&self) -> AcousticScene {
        let mut scene = AcousticScene::new(
            &self.air_state(),
            self.scene.frequency,
            self.scene.source_pressure_amplitude,
            self.scene.source_position,
        );
        scene.phase_offset = self.scene.phase_offset;
        scene
    }

    pub fn analyzer(&self) -> AnalyzerSettings {
        let a = &self.analysis;
        AnalyzerSettings {
            rbw: a.rbw,
            vbw: a.vbw,
            n_avg: a.n_avg,
            span: a.span,
            sample_rate: a.sample_rate,
            guard_bins: a.guard_bins,
            calibration_length: a.calibration_length,
        }
    }

    pub fn bench(&self) -> Bench {
        Bench {
            air: self.air_state(),
            beam: self.beam,
            interferometer: self.interferometer,
            analyzer: self.analyzer(),
            interaction_length: match self.scene.effective_length {
                Some(z) => InteractionLength::Fixed(z),
                None => InteractionLength::Model,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Read, default-fill and validate a configuration file. A metadata sidecar
/// written by a previous run is accepted as well and yields its config.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let config = parse_config_str(&text).map_err(|e| match e {
        Error::Config { message, .. } => Error::Config {
            path: path.display().to_string(),
            message,
        },
        other => other,
    })?;
    Ok(config)
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let text = if text.trim().is_empty() { "{}" } else { text };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Config {
        path: "<input>".into(),
        message: format!("malformed JSON: {e}"),
    })?;
    let value = match value {
        serde_json::Value::Object(mut map) if map.contains_key("command") && map.contains_key("config") => {
            map.remove("config").expect("checked above")
        }
        other => other,
    };
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        Error::Config {
            path: "<input>".into(),
            message: if field == "." {
                e.inner().to_string()
            } else {
                format!("{field}: {}", e.inner())
            },
        }
    })?;
    config.validate()?;
    Ok(config)
}

/// JSON sidecar describing one CLI run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    pub tool_version: String,
    pub outputs: Vec<String>,
    pub config: RunConfig,
}

impl RunMetadata {
    pub fn new(command: &str, config: &RunConfig, outputs: Vec<String>) -> Self {
        RunMetadata {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            config: config.clone(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}
