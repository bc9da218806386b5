//! Balanced mid-fringe Mach-Zehnder readout.
//!
//! The simulator works in equivalent-displacement units: every sample is the
//! differential optical path length (m) that would produce the observed
//! differential photocurrent. The control loop is assumed ideal, so the
//! operating point sits exactly at mid-fringe.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ensure, Error, Result};
use crate::quantum::shot_noise_asd;

/// Synthesis requires at least this many samples per signal period.
pub const MIN_OVERSAMPLING: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterferometerConfig {
    /// Carrier power summed over both arms, W.
    pub input_power: f64,
    /// Fringe visibility.
    pub contrast: f64,
    /// Photodiode quantum efficiency.
    pub detector_efficiency: f64,
    /// Fractional power loss between the interferometer and the detectors.
    pub carrier_path_loss: f64,
    /// Electronic dark noise in equivalent displacement, m/sqrt(Hz).
    pub dark_noise_asd: f64,
}

impl Default for InterferometerConfig {
    fn default() -> Self {
        InterferometerConfig {
            input_power: 12e-3,
            contrast: 0.99,
            detector_efficiency: 0.99,
            carrier_path_loss: 0.02,
            dark_noise_asd: default_dark_noise_asd(),
        }
    }
}

/// Default dark noise, 20 dB below the 12 mW / 1550 nm shot noise.
pub fn default_dark_noise_asd() -> f64 {
    0.1 * shot_noise_asd(1550e-9, 12e-3).expect("reference values are valid")
}

impl InterferometerConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.input_power.is_finite() && self.input_power > 0.0,
            "input_power",
            "must be > 0 W",
        )?;
        for (name, v) in [
            ("contrast", self.contrast),
            ("detector_efficiency", self.detector_efficiency),
        ] {
            ensure(v > 0.0 && v <= 1.0, name, "must be within (0, 1]")?;
        }
        ensure(
            (0.0..1.0).contains(&self.carrier_path_loss),
            "carrier_path_loss",
            "must be within [0, 1)",
        )?;
        ensure(
            self.dark_noise_asd.is_finite() && self.dark_noise_asd >= 0.0,
            "dark_noise_asd",
            "must be >= 0",
        )
    }

    /// Power reaching the photodiodes after path loss and quantum efficiency.
    pub fn detected_power(&self) -> f64 {
        self.input_power * (1.0 - self.carrier_path_loss) * self.detector_efficiency
    }

    /// Shot-noise ASD of the detected light, m/sqrt(Hz).
    pub fn shot_noise_asd(&self, wavelength: f64) -> Result<f64> {
        shot_noise_asd(wavelength, self.detected_power())
    }

    /// One-sided noise PSD for quadrature variance `noise_variance`, dark
    /// noise included, m^2/Hz.
    pub fn noise_psd(&self, wavelength: f64, noise_variance: f64) -> Result<f64> {
        let shot = self.shot_noise_asd(wavelength)?;
        Ok(shot * shot * noise_variance + self.dark_noise_asd * self.dark_noise_asd)
    }

    fn digest(&self, request: &SynthesisRequest) -> String {
        let doc = serde_json::json!({ "interferometer": self, "request": request });
        hex::encode(Sha256::digest(doc.to_string().as_bytes()))
    }
}

/// Small-signal slope `dP_diff / dL = 2 pi P_in C / lambda` at mid-fringe,
/// W/m.
pub fn midfringe_gain(config: &InterferometerConfig, wavelength: f64) -> f64 {
    2.0 * PI * config.input_power * config.contrast / wavelength
}

/// Parameters of one synthesized record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisRequest {
    /// Optical wavelength, m; sets the shot-noise level.
    pub wavelength: f64,
    /// Peak path-length modulation, m.
    pub signal_amplitude: f64,
    pub signal_frequency: f64,
    pub signal_phase: f64,
    /// Quantum noise variance relative to shot noise.
    pub noise_variance: f64,
    pub sample_rate: f64,
    /// s.
    pub duration: f64,
    pub seed: u64,
}

impl SynthesisRequest {
    pub fn sample_count(&self) -> usize {
        (self.sample_rate * self.duration).round() as usize
    }

    fn validate(&self) -> Result<()> {
        ensure(
            self.sample_rate.is_finite() && self.sample_rate > 0.0,
            "sample_rate",
            "must be > 0 Hz",
        )?;
        ensure(
            self.duration.is_finite() && self.duration > 0.0,
            "duration",
            "must be > 0 s",
        )?;
        ensure(
            self.signal_frequency >= 0.0 && self.signal_frequency.is_finite(),
            "signal_frequency",
            "must be >= 0 Hz",
        )?;
        ensure(
            self.sample_rate > MIN_OVERSAMPLING * self.signal_frequency,
            "sample_rate",
            "must exceed 2.5 x signal_frequency (aliasing)",
        )?;
        ensure(
            self.signal_amplitude.is_finite() && self.signal_amplitude >= 0.0,
            "signal_amplitude",
            "must be >= 0 m",
        )?;
        ensure(
            self.noise_variance.is_finite() && self.noise_variance >= 0.0,
            "noise_variance",
            "must be >= 0",
        )
    }
}

/// Sampled differential path-length readout.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub sample_rate: f64,
    pub duration: f64,
    pub seed: u64,
    /// SHA-256 of the configuration that produced the record.
    pub config_digest: String,
    /// m.
    pub samples: Vec<f64>,
}

/// Sidecar written next to a binary sample dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesMetadata {
    pub format: String,
    pub sample_rate: f64,
    pub duration: f64,
    pub seed: u64,
    pub n_samples: usize,
    pub config_digest: String,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn variance(&self) -> f64 {
        let n = self.samples.len() as f64;
        let mean = self.samples.iter().sum::<f64>() / n;
        self.samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n
    }

    pub fn metadata(&self) -> TimeSeriesMetadata {
        TimeSeriesMetadata {
            format: "f64le".to_string(),
            sample_rate: self.sample_rate,
            duration: self.duration,
            seed: self.seed,
            n_samples: self.samples.len(),
            config_digest: self.config_digest.clone(),
        }
    }

    /// Raw little-endian f64 samples to `path`, metadata JSON to
    /// `path` with `.json` appended. Returns the metadata path.
    pub fn write_binary(&self, path: &Path) -> Result<PathBuf> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        for x in &self.samples {
            out.write_all(&x.to_le_bytes()).map_err(|e| Error::io(path, e))?;
        }
        out.flush().map_err(|e| Error::io(path, e))?;

        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".json");
        let meta_path = PathBuf::from(meta_path);
        let meta = serde_json::to_string_pretty(&self.metadata())?;
        std::fs::write(&meta_path, meta).map_err(|e| Error::io(&meta_path, e))?;
        Ok(meta_path)
    }

    /// Reads a dump written by [`TimeSeries::write_binary`].
    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut meta_path = path.as_os_str().to_owned();
        meta_path.push(".json");
        let meta_path = PathBuf::from(meta_path);
        let meta = std::fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: TimeSeriesMetadata = serde_json::from_str(&meta)?;
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() != meta.n_samples * 8 {
            return Err(Error::InsufficientData(format!(
                "{} holds {} bytes, metadata expects {} samples",
                path.display(),
                bytes.len(),
                meta.n_samples
            )));
        }
        let samples = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
            .collect();
        Ok(TimeSeries {
            sample_rate: meta.sample_rate,
            duration: meta.duration,
            seed: meta.seed,
            config_digest: meta.config_digest,
            samples,
        })
    }

    /// `time_s,displacement_m` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["time_s", "displacement_m"])?;
        for (k, x) in self.samples.iter().enumerate() {
            let t = k as f64 / self.sample_rate;
            w.write_record([t.to_string(), x.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

/// Signal tone plus white quantum and dark noise.
///
/// `x[k] = A cos(2 pi f t_k + phi) + n[k]` where `n` is Gaussian with
/// one-sided PSD `S_shot V + S_dark`; a one-sided density `S` sampled at
/// `fs` has per-sample variance `S fs / 2`. Deterministic for a fixed seed.
pub fn synthesize(config: &InterferometerConfig, request: &SynthesisRequest) -> Result<TimeSeries> {
    config.validate()?;
    request.validate()?;

    let fs = request.sample_rate;
    let n = request.sample_count();
    let noise_psd = config.noise_psd(request.wavelength, request.noise_variance)?;
    let sigma = (noise_psd * fs / 2.0).sqrt();

    let omega = 2.0 * PI * request.signal_frequency / fs;
    let mut rng = ChaCha8Rng::seed_from_u64(request.seed);
    let samples = (0..n)
        .map(|k| {
            let tone = request.signal_amplitude * (omega * k as f64 + request.signal_phase).cos();
            let z: f64 = StandardNormal.sample(&mut rng);
            tone + sigma * z
        })
        .collect();

    Ok(TimeSeries {
        sample_rate: fs,
        duration: request.duration,
        seed: request.seed,
        config_digest: config.digest(request),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn request(seed: u64) -> SynthesisRequest {
        SynthesisRequest {
            wavelength: 1550e-9,
            signal_amplitude: 1e-12,
            signal_frequency: 5.204e6,
            signal_phase: 0.0,
            noise_variance: 1.0,
            sample_rate: 32e6,
            duration: 1e-3,
            seed,
        }
    }

    #[test]
    fn midfringe_gain_examples() {
        let ideal = InterferometerConfig {
            contrast: 1.0,
            ..InterferometerConfig::default()
        };
        assert_relative_eq!(
            midfringe_gain(&ideal, 1550e-9),
            4.864_401_528_14e4,
            max_relative = 1e-10
        );
        let none = InterferometerConfig { contrast: 0.0, ..ideal };
        assert_eq!(midfringe_gain(&none, 1550e-9), 0.0);
        let real = InterferometerConfig {
            contrast: 0.99,
            ..ideal
        };
        assert_relative_eq!(
            midfringe_gain(&real, 1550e-9),
            0.99 * midfringe_gain(&ideal, 1550e-9),
            max_relative = 1e-15
        );
    }

    #[test]
    fn detected_power_includes_losses() {
        let cfg = InterferometerConfig::default();
        assert_relative_eq!(cfg.detected_power(), 12e-3 * 0.98 * 0.99, max_relative = 1e-15);
        assert_relative_eq!(
            cfg.shot_noise_asd(1550e-9).unwrap(),
            1.157_492_235_857e-15,
            max_relative = 1e-10
        );
    }

    #[test]
    fn same_seed_same_samples() {
        let cfg = InterferometerConfig::default();
        let a = synthesize(&cfg, &request(7)).unwrap();
        let b = synthesize(&cfg, &request(7)).unwrap();
        let c = synthesize(&cfg, &request(8)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.samples, c.samples);
        assert_eq!(a.len(), 32_000);
    }

    #[test]
    fn rejects_aliasing() {
        let cfg = InterferometerConfig::default();
        let bad = SynthesisRequest {
            sample_rate: 12e6,
            ..request(0)
        };
        assert!(synthesize(&cfg, &bad).is_err());
    }

    #[test]
    fn noiseless_tone() {
        let cfg = InterferometerConfig {
            dark_noise_asd: 0.0,
            ..InterferometerConfig::default()
        };
        let req = SynthesisRequest {
            noise_variance: 0.0,
            ..request(0)
        };
        let ts = synthesize(&cfg, &req).unwrap();
        assert_eq!(ts.samples[0], 1e-12);
        let max = ts.samples.iter().cloned().fold(0.0, f64::max);
        assert!(max <= 1e-12 && max > 0.99e-12);
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = InterferometerConfig::default();
        let ts = synthesize(&cfg, &request(3)).unwrap();
        let path = dir.path().join("record.f64");
        let meta = ts.write_binary(&path).unwrap();
        assert!(meta.exists());
        assert_eq!(TimeSeries::read_binary(&path).unwrap(), ts);
    }
}
