//! End-to-end measurements: sound field -> optical path modulation ->
//! balanced detection -> analyzer trace -> calibrated peak.

mod demo;
mod fit;
mod sweep;

pub use demo::{run_squeezing_demo, DemoTrace, NoiseKind, SqueezingDemo, VISIBILITY_THRESHOLD_DB};
pub use fit::{fit_decay, fit_decay_weighted, DecayFit, DistanceSeries, FitWeighting};
pub use sweep::{
    linspace, run_frequency_sweep, run_temperature_sweep, write_frequency_sweep_csv, write_temperature_sweep_csv,
    RowStatus, SourceSpectrum, SweepRow, SweepSettings,
};

use serde::{Deserialize, Serialize};

use crate::air::{piezooptic_coefficient, AirState};
use crate::error::{ensure, Result};
use crate::interferometer::{synthesize, InterferometerConfig, SynthesisRequest};
use crate::optics::{
    acoustic_pressure_at, delta_n, effective_interaction_length, AcousticScene, GaussianBeam, InteractionResult,
};
use crate::spectrum::{apply_vbw, averaged_psd, extract_peak, segment_length, PeakMeasurement, SpectrumTrace};

/// Analyzer and calibration settings shared by every measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerSettings {
    /// Hz.
    pub rbw: f64,
    /// Hz.
    pub vbw: f64,
    pub n_avg: usize,
    /// Displayed span around the tone, Hz.
    pub span: f64,
    /// Hz.
    pub sample_rate: f64,
    /// Bins either side of the peak excluded from the floor estimate.
    pub guard_bins: usize,
    /// Interaction length used to convert displacement to pressure, m.
    /// `None` uses the same modelled length as the forward simulation.
    pub calibration_length: Option<f64>,
}

impl Default for AnalyzerSettings {
    fn default() -> Self {
        AnalyzerSettings {
            rbw: 1e3,
            vbw: 10.0,
            n_avg: 30,
            span: 100e3,
            sample_rate: 32e6,
            guard_bins: 10,
            calibration_length: None,
        }
    }
}

impl AnalyzerSettings {
    pub fn validate(&self) -> Result<()> {
        ensure(self.rbw.is_finite() && self.rbw > 0.0, "rbw", "must be > 0 Hz")?;
        ensure(
            self.vbw.is_finite() && self.vbw > 0.0 && self.vbw <= self.rbw,
            "vbw",
            "must be within (0, rbw]",
        )?;
        ensure(self.n_avg >= 1, "n_avg", "must be >= 1")?;
        ensure(self.span.is_finite() && self.span > 0.0, "span", "must be > 0 Hz")?;
        ensure(
            self.sample_rate.is_finite() && self.sample_rate > 0.0,
            "sample_rate",
            "must be > 0 Hz",
        )?;
        ensure(
            segment_length(self.sample_rate, self.rbw) >= 4,
            "rbw",
            "too wide for the sample rate",
        )?;
        if let Some(z) = self.calibration_length {
            ensure(z.is_finite() && z > 0.0, "calibration_length", "must be > 0 m")?;
        }
        Ok(())
    }

    /// Record length holding exactly `n_avg` analysis segments, s.
    pub fn record_duration(&self) -> f64 {
        (segment_length(self.sample_rate, self.rbw) * self.n_avg) as f64 / self.sample_rate
    }

    /// RBW actually realised by the integer segment length.
    pub fn realised_rbw(&self) -> f64 {
        1.5 * self.sample_rate / segment_length(self.sample_rate, self.rbw) as f64
    }
}

/// How the forward simulation obtains the effective interaction length.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionLength {
    /// Integrated Gaussian-beam wash-out.
    #[default]
    Model,
    /// Fixed value, m.
    Fixed(f64),
}

/// Path-length tone seen by the interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    /// Peak amplitude, m.
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

/// One analyzer acquisition.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Averaged RBW-limited trace over the span, m^2/Hz.
    pub trace: SpectrumTrace,
    /// `trace` after video filtering.
    pub display: SpectrumTrace,
    /// Peak read from `trace`, m/sqrt(Hz).
    pub peak: PeakMeasurement,
}

/// The complete optical bench: air, beam, interferometer and analyzer.
#[derive(Debug, Clone, PartialEq)]
pub struct Bench {
    pub air: AirState,
    pub beam: GaussianBeam,
    pub interferometer: InterferometerConfig,
    pub analyzer: AnalyzerSettings,
    pub interaction_length: InteractionLength,
}

impl Default for Bench {
    fn default() -> Self {
        Bench {
            air: AirState::default(),
            beam: GaussianBeam::default(),
            interferometer: InterferometerConfig::default(),
            analyzer: AnalyzerSettings::default(),
            interaction_length: InteractionLength::Model,
        }
    }
}

impl Bench {
    pub fn validate(&self) -> Result<()> {
        self.air.validate().map_err(|e| e.within("air"))?;
        self.beam.validate().map_err(|e| e.within("beam"))?;
        self.interferometer.validate().map_err(|e| e.within("interferometer"))?;
        self.analyzer.validate().map_err(|e| e.within("analysis"))
    }

    /// Bench without dark noise. Quantum noise is removed separately by
    /// measuring with a noise variance of zero.
    pub fn noiseless(&self) -> Bench {
        let mut bench = self.clone();
        bench.interferometer.dark_noise_asd = 0.0;
        bench
    }

    /// Forward-model interaction length for a given acoustic wavelength, m.
    pub fn effective_length(&self, acoustic_wavelength: f64) -> f64 {
        match self.interaction_length {
            InteractionLength::Model => effective_interaction_length(&self.beam, acoustic_wavelength).value,
            InteractionLength::Fixed(z) => z,
        }
    }

    /// Interaction length used when calibrating traces in pressure, m.
    pub fn calibration_length(&self, acoustic_wavelength: f64) -> f64 {
        self.analyzer
            .calibration_length
            .unwrap_or_else(|| self.effective_length(acoustic_wavelength))
    }

    /// Pa/sqrt(Hz) per m/sqrt(Hz) at `frequency`.
    pub fn pressure_per_displacement(&self, frequency: f64) -> f64 {
        let z = self.calibration_length(self.air.acoustic_wavelength(frequency));
        1.0 / (z * piezooptic_coefficient(&self.air).value)
    }

    /// Shot-noise ASD of the detected carrier, m/sqrt(Hz).
    pub fn shot_noise_asd(&self) -> Result<f64> {
        self.interferometer.shot_noise_asd(self.beam.wavelength)
    }

    /// Expected noise floor PSD (quantum + dark) for variance `v`, m^2/Hz.
    pub fn expected_noise_psd(&self, noise_variance: f64) -> Result<f64> {
        self.interferometer.noise_psd(self.beam.wavelength, noise_variance)
    }

    /// Index modulation and path amplitude for a beam `distance_mm` away
    /// from the source face, together with the acoustic phase there.
    pub fn interaction(&self, scene: &AcousticScene, distance_mm: f64) -> Result<(InteractionResult, f64)> {
        let (pressure, phase) = acoustic_pressure_at(scene, &self.air, distance_mm)?;
        let result = InteractionResult::new(
            delta_n(&self.air, pressure),
            self.effective_length(scene.acoustic_wavelength),
        );
        Ok((result, phase))
    }

    /// Path-length tone produced by a pressure amplitude at the beam.
    pub fn tone_for_pressure(&self, pressure_amplitude: f64, frequency: f64) -> Tone {
        let z = self.effective_length(self.air.acoustic_wavelength(frequency));
        Tone {
            amplitude: z * delta_n(&self.air, pressure_amplitude),
            frequency,
            phase: 0.0,
        }
    }

    /// Pressure amplitude at the beam whose calibrated peak reads
    /// `signal_asd_pa` Pa/sqrt(Hz) at the analyzer RBW.
    pub fn pressure_for_signal_asd(&self, signal_asd_pa: f64, frequency: f64) -> f64 {
        let asd_m = signal_asd_pa / self.pressure_per_displacement(frequency);
        let rms = asd_m * self.analyzer.realised_rbw().sqrt();
        let amplitude = rms * std::f64::consts::SQRT_2;
        let z = self.effective_length(self.air.acoustic_wavelength(frequency));
        amplitude / (z * piezooptic_coefficient(&self.air).value)
    }

    /// Synthesize, analyse and read the peak of one tone.
    pub fn measure(&self, tone: &Tone, noise_variance: f64, seed: u64) -> Result<Measurement> {
        let analyzer = &self.analyzer;
        let request = SynthesisRequest {
            wavelength: self.beam.wavelength,
            signal_amplitude: tone.amplitude,
            signal_frequency: tone.frequency,
            signal_phase: tone.phase,
            noise_variance,
            sample_rate: analyzer.sample_rate,
            duration: analyzer.record_duration(),
            seed,
        };
        let ts = synthesize(&self.interferometer, &request)?;
        let full = averaged_psd(&ts, analyzer.rbw, analyzer.n_avg)?;
        let trace = full.crop(tone.frequency, analyzer.span);
        let peak = extract_peak(&trace, tone.frequency, analyzer.guard_bins)?;
        let display = apply_vbw(&trace, analyzer.vbw.min(trace.rbw))?;
        Ok(Measurement { trace, display, peak })
    }
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of measurement `index` in sweep row `row`:
/// `splitmix64(splitmix64(master + row * G) + index * G)` with `G` the
/// 64-bit golden-ratio increment. Streams for different rows or indices
/// never share a seed in practice and do not depend on execution order.
pub fn derive_seed(master: u64, row: u64, index: u64) -> u64 {
    let row_seed = splitmix64(master.wrapping_add(row.wrapping_mul(GOLDEN_GAMMA)));
    splitmix64(row_seed.wrapping_add(index.wrapping_mul(GOLDEN_GAMMA)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn record_holds_exactly_the_segments() {
        let a = AnalyzerSettings::default();
        assert_eq!(segment_length(a.sample_rate, a.rbw), 48_000);
        assert_relative_eq!(a.record_duration(), 0.045, max_relative = 1e-15);
        assert_relative_eq!(a.realised_rbw(), 1e3, max_relative = 1e-15);
    }

    #[test]
    fn seeds_are_distinct_and_stable() {
        let s = derive_seed(1, 2, 3);
        assert_eq!(s, derive_seed(1, 2, 3));
        assert_ne!(s, derive_seed(1, 3, 2));
        assert_ne!(s, derive_seed(2, 2, 3));
    }

    #[test]
    fn pressure_for_signal_inverts_the_chain() {
        let mut bench = Bench {
            interaction_length: InteractionLength::Fixed(1e-3),
            ..Bench::default()
        };
        bench.analyzer.calibration_length = Some(1e-3);
        let p = bench.pressure_for_signal_asd(9e-3, 5.204e6);
        // 9 mPa/sqrt(Hz) at 1 kHz RBW is 0.2846 Pa RMS
        assert_relative_eq!(p, 9e-3 * 1e3f64.sqrt() * 2f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn validation_prefixes_sections() {
        let mut bench = Bench::default();
        bench.analyzer.rbw = 0.0;
        let err = bench.validate().unwrap_err().to_string();
        assert!(err.starts_with("analysis.rbw"), "{err}");
    }
}
