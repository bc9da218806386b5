//! Spectrum-analyzer emulation.
//!
//! Traces are one-sided power spectral densities. The resolution bandwidth
//! is realised with a periodic Hann window, whose equivalent noise bandwidth
//! is exactly 1.5 bins, so a segment of `N = 1.5 fs / RBW` samples yields a
//! bin whose noise bandwidth equals the requested RBW. Density
//! normalisation makes white noise of ASD `a` average to `a^2`, while a
//! bin-centred tone of amplitude `A` peaks at `A^2 / (2 RBW)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::interferometer::TimeSeries;
use crate::quantum::to_db;

/// Equivalent noise bandwidth of the periodic Hann window, in bins.
pub const HANN_ENBW_BINS: f64 = 1.5;
/// Minimum number of off-peak bins the noise floor is estimated from.
pub const MIN_FLOOR_BINS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumUnit {
    /// m^2/Hz
    Displacement,
    /// Pa^2/Hz
    Pressure,
    /// Dimensionless, relative to the shot-noise variance.
    RelativeToShotNoise,
}

impl SpectrumUnit {
    pub fn label(self) -> &'static str {
        match self {
            SpectrumUnit::Displacement => "m^2/Hz",
            SpectrumUnit::Pressure => "Pa^2/Hz",
            SpectrumUnit::RelativeToShotNoise => "relative",
        }
    }
}

impl fmt::Display for SpectrumUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A displayed analyzer trace with its acquisition settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    /// Hz, strictly increasing and uniformly spaced.
    pub frequencies: Vec<f64>,
    pub values: Vec<f64>,
    pub unit: SpectrumUnit,
    pub rbw: f64,
    pub vbw: f64,
    pub n_avg: usize,
}

impl SpectrumTrace {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Spacing of adjacent bins, Hz.
    pub fn bin_width(&self) -> f64 {
        match self.frequencies.as_slice() {
            [a, b, ..] => b - a,
            _ => self.rbw / HANN_ENBW_BINS,
        }
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Integral of the density over the trace, `sum(values) * df`.
    pub fn integrated_power(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.bin_width()
    }

    /// Bins within `center +- span / 2`.
    pub fn crop(&self, center: f64, span: f64) -> SpectrumTrace {
        let lo = center - span / 2.0;
        let hi = center + span / 2.0;
        let (frequencies, values) = self
            .frequencies
            .iter()
            .zip(&self.values)
            .filter(|(f, _)| (lo..=hi).contains(*f))
            .map(|(f, v)| (*f, *v))
            .unzip();
        SpectrumTrace {
            frequencies,
            values,
            ..*self
        }
    }

    fn with_values(&self, values: Vec<f64>, unit: SpectrumUnit) -> SpectrumTrace {
        SpectrumTrace {
            frequencies: self.frequencies.clone(),
            values,
            unit,
            rbw: self.rbw,
            vbw: self.vbw,
            n_avg: self.n_avg,
        }
    }

    /// Multiply every density by `factor`, keeping or relabelling the unit.
    pub fn scaled(&self, factor: f64, unit: SpectrumUnit) -> SpectrumTrace {
        self.with_values(self.values.iter().map(|v| v * factor).collect(), unit)
    }

    /// Convert a displacement trace to pressure using the interaction length
    /// `z_m` (m) and the piezo-optic coefficient `dn_dp` (1/Pa).
    pub fn to_pressure(&self, z_m: f64, dn_dp: f64) -> Result<SpectrumTrace> {
        expect_unit(self, &[SpectrumUnit::Displacement])?;
        let k = asd_to_pressure(1.0, z_m, dn_dp)?;
        Ok(self.scaled(k * k, SpectrumUnit::Pressure))
    }

    /// CSV with header `frequency_hz,value,unit,rbw_hz,vbw_hz,n_avg`;
    /// relative traces get an extra `value_db` column.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let relative = self.unit == SpectrumUnit::RelativeToShotNoise;
        let mut header = vec!["frequency_hz", "value", "unit", "rbw_hz", "vbw_hz", "n_avg"];
        if relative {
            header.push("value_db");
        }
        w.write_record(&header)?;
        for (f, v) in self.frequencies.iter().zip(&self.values) {
            let mut row = vec![
                f.to_string(),
                v.to_string(),
                self.unit.label().to_string(),
                self.rbw.to_string(),
                self.vbw.to_string(),
                self.n_avg.to_string(),
            ];
            if relative {
                row.push(to_db(*v).to_string());
            }
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }
}

fn expect_unit(trace: &SpectrumTrace, allowed: &[SpectrumUnit]) -> Result<()> {
    if allowed.contains(&trace.unit) {
        Ok(())
    } else {
        Err(Error::UnitMismatch {
            expected: allowed.iter().map(|u| u.label()).collect::<Vec<_>>().join(" or "),
            found: trace.unit.label().to_string(),
        })
    }
}

/// Periodic Hann window of length `n`.
pub fn hann_window(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 0.5 - 0.5 * (2.0 * PI * k as f64 / n as f64).cos())
        .collect()
}

/// Equivalent noise bandwidth of `window`, in bins.
pub fn enbw_bins(window: &[f64]) -> f64 {
    let sum: f64 = window.iter().sum();
    let sum_sq: f64 = window.iter().map(|w| w * w).sum();
    window.len() as f64 * sum_sq / (sum * sum)
}

/// Segment length whose Hann ENBW best matches `rbw`.
pub fn segment_length(sample_rate: f64, rbw: f64) -> usize {
    (HANN_ENBW_BINS * sample_rate / rbw).round() as usize
}

/// Average of `n_avg` non-overlapping Hann-windowed periodograms.
///
/// Uses the first `n_avg * N` samples of the record. The returned trace
/// covers DC to Nyquist; its `rbw` is the realised ENBW `1.5 fs / N`.
pub fn averaged_psd(ts: &TimeSeries, rbw: f64, n_avg: usize) -> Result<SpectrumTrace> {
    ensure(rbw.is_finite() && rbw > 0.0, "rbw", "must be > 0 Hz")?;
    ensure(n_avg >= 1, "n_avg", "must be >= 1")?;
    let fs = ts.sample_rate;
    let n = segment_length(fs, rbw);
    if n < 4 {
        return Err(Error::invalid("rbw", "too wide for the sample rate"));
    }
    if n * n_avg > ts.samples.len() {
        return Err(Error::InsufficientData(format!(
            "rbw {rbw} Hz with {n_avg} averages needs {} samples, record has {}",
            n * n_avg,
            ts.samples.len()
        )));
    }

    let window = hann_window(n);
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let half = n / 2;
    let mut acc = vec![0.0; half + 1];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    for segment in ts.samples.chunks_exact(n).take(n_avg) {
        for ((b, x), w) in buf.iter_mut().zip(segment).zip(&window) {
            *b = Complex64::new(x * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }

    let scale = 1.0 / (fs * window_power * n_avg as f64);
    let values = acc
        .iter()
        .enumerate()
        .map(|(k, p)| {
            // one-sided: fold negative frequencies except at DC and Nyquist
            let fold = if k == 0 || (n.is_multiple_of(2) && k == half) {
                1.0
            } else {
                2.0
            };
            fold * p * scale
        })
        .collect();
    let frequencies = (0..=half).map(|k| k as f64 * fs / n as f64).collect();
    let realised_rbw = enbw_bins(&window) * fs / n as f64;

    Ok(SpectrumTrace {
        frequencies,
        values,
        unit: SpectrumUnit::Displacement,
        rbw: realised_rbw,
        vbw: realised_rbw,
        n_avg,
    })
}

/// Video filtering emulated as single-pole smoothing across bins with a
/// time constant of `rbw / vbw` bins.
///
/// The mean of flat regions is preserved and bin-to-bin scatter drops by
/// about `sqrt(vbw / rbw)`; a narrow line is spread over roughly `rbw / vbw`
/// bins with its integrated power conserved. The filter state starts at the
/// median of the first `rbw / vbw` bins, so a line near the start of the
/// trace does not bias it.
pub fn apply_vbw(trace: &SpectrumTrace, vbw: f64) -> Result<SpectrumTrace> {
    ensure(vbw.is_finite() && vbw > 0.0, "vbw", "must be > 0 Hz")?;
    ensure(vbw <= trace.rbw * (1.0 + 1e-12), "vbw", "must not exceed rbw")?;
    let tau = trace.rbw / vbw;
    let alpha = 1.0 / tau;
    let lead = (tau.ceil() as usize).clamp(1, trace.values.len().max(1));
    let mut state = if trace.values.is_empty() {
        0.0
    } else {
        median(&mut trace.values[..lead].to_vec())
    };
    let values = trace
        .values
        .iter()
        .map(|x| {
            state += alpha * (x - state);
            state
        })
        .collect();
    let mut out = trace.with_values(values, trace.unit);
    out.vbw = vbw;
    Ok(out)
}

/// Divide by the shot-noise PSD. `shot_asd` is in the trace's own ASD unit
/// (m/sqrt(Hz) for displacement traces, Pa/sqrt(Hz) for pressure traces).
pub fn normalize_to_shot_noise(trace: &SpectrumTrace, shot_asd: f64) -> Result<SpectrumTrace> {
    expect_unit(trace, &[SpectrumUnit::Displacement, SpectrumUnit::Pressure])?;
    ensure(shot_asd > 0.0, "shot_asd", "must be > 0")?;
    Ok(trace.scaled(1.0 / (shot_asd * shot_asd), SpectrumUnit::RelativeToShotNoise))
}

/// `sqrt(S_p) = sqrt(S_z) / (z_M dn/dp)`.
pub fn asd_to_pressure(asd_m: f64, z_m: f64, dn_dp: f64) -> Result<f64> {
    ensure(asd_m >= 0.0, "asd", "must be >= 0")?;
    ensure(z_m > 0.0, "z_m", "must be > 0 m")?;
    ensure(dn_dp > 0.0, "dn_dp", "must be > 0 1/Pa")?;
    Ok(asd_m / (z_m * dn_dp))
}

/// How the noise floor is removed from a peak reading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubtractionDomain {
    /// `signal^2 = total^2 - floor^2`.
    #[default]
    Power,
    /// `signal = total - floor`.
    Amplitude,
}

/// Tone reading at one frequency. ASD fields are in the square root of the
/// trace unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakMeasurement {
    pub frequency: f64,
    pub total_asd: f64,
    pub noise_floor_asd: f64,
    /// Floor removed in the power domain.
    pub signal_asd: f64,
    /// Highest raw bin near the requested frequency.
    pub peak_bin_value: f64,
}

impl PeakMeasurement {
    pub fn signal_asd_in(&self, domain: SubtractionDomain) -> f64 {
        match domain {
            SubtractionDomain::Power => self.signal_asd,
            SubtractionDomain::Amplitude => (self.total_asd - self.noise_floor_asd).max(0.0),
        }
    }

    /// Peak-over-floor ratio in dB (power).
    pub fn peak_to_floor_db(&self) -> f64 {
        20.0 * (self.total_asd / self.noise_floor_asd).log10()
    }

    pub fn is_visible(&self, threshold_db: f64) -> bool {
        self.peak_to_floor_db() >= threshold_db
    }

    /// All ASD fields multiplied by `factor` (e.g. m -> Pa).
    pub fn scaled(&self, factor: f64) -> PeakMeasurement {
        PeakMeasurement {
            frequency: self.frequency,
            total_asd: self.total_asd * factor,
            noise_floor_asd: self.noise_floor_asd * factor,
            signal_asd: self.signal_asd * factor,
            peak_bin_value: self.peak_bin_value * factor * factor,
        }
    }
}

/// Reads the tone nearest `f0`.
///
/// The peak bin is the largest within `+-1 RBW` of `f0`. The floor is the
/// median of all bins further than `guard_bins` from it. The tone power is
/// the floor-subtracted sum of the peak bin and its two neighbours, which
/// holds 1.5 bins worth of a bin-centred Hann line and so undoes scalloping;
/// it is reported back as a density at the trace RBW. Then
/// `total^2 = floor^2 + signal^2` exactly.
pub fn extract_peak(trace: &SpectrumTrace, f0: f64, guard_bins: usize) -> Result<PeakMeasurement> {
    let (first, last) = match (trace.frequencies.first(), trace.frequencies.last()) {
        (Some(a), Some(b)) => (*a, *b),
        _ => return Err(Error::InsufficientData("empty trace".into())),
    };
    if !(first..=last).contains(&f0) {
        return Err(Error::invalid(
            "f0",
            format!("{f0} Hz outside trace span [{first}, {last}] Hz"),
        ));
    }
    let df = trace.bin_width();
    let nearest = (((f0 - first) / df).round() as usize).min(trace.len() - 1);
    let reach = (trace.rbw / df).floor() as usize;
    let lo = nearest.saturating_sub(reach);
    let hi = (nearest + reach).min(trace.len() - 1);
    let peak = (lo..=hi)
        .max_by(|&a, &b| trace.values[a].total_cmp(&trace.values[b]))
        .expect("non-empty window");

    let mut off_peak: Vec<f64> = trace
        .values
        .iter()
        .enumerate()
        .filter(|(k, _)| k.abs_diff(peak) > guard_bins)
        .map(|(_, v)| *v)
        .collect();
    if off_peak.len() < MIN_FLOOR_BINS {
        return Err(Error::InsufficientData(format!(
            "{} off-peak bins for the noise floor, need {MIN_FLOOR_BINS}",
            off_peak.len()
        )));
    }
    let floor = median(&mut off_peak);

    let excess: f64 = (peak.saturating_sub(1)..=(peak + 1).min(trace.len() - 1))
        .map(|k| trace.values[k] - floor)
        .sum();
    let signal = (excess * df / trace.rbw).max(0.0);

    Ok(PeakMeasurement {
        frequency: trace.frequencies[peak],
        total_asd: (floor + signal).sqrt(),
        noise_floor_asd: floor.sqrt(),
        signal_asd: signal.sqrt(),
        peak_bin_value: trace.values[peak],
    })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tone(amplitude: f64, frequency: f64, fs: f64, n: usize) -> TimeSeries {
        TimeSeries {
            sample_rate: fs,
            duration: n as f64 / fs,
            seed: 0,
            config_digest: String::new(),
            samples: (0..n)
                .map(|k| amplitude * (2.0 * PI * frequency * k as f64 / fs).cos())
                .collect(),
        }
    }

    fn flat(values: Vec<f64>, rbw: f64) -> SpectrumTrace {
        let df = rbw / HANN_ENBW_BINS;
        SpectrumTrace {
            frequencies: (0..values.len()).map(|k| k as f64 * df).collect(),
            values,
            unit: SpectrumUnit::Displacement,
            rbw,
            vbw: rbw,
            n_avg: 1,
        }
    }

    #[test]
    fn hann_enbw_is_one_and_a_half_bins() {
        assert_relative_eq!(enbw_bins(&hann_window(48_000)), 1.5, max_relative = 1e-12);
        assert_relative_eq!(enbw_bins(&hann_window(37)), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn bin_centred_tone_peaks_at_a_squared_over_two_rbw() {
        let fs = 1.0e6;
        let rbw = 1.0e3;
        let n = segment_length(fs, rbw);
        let ts = tone(2.0, 100.0 * fs / n as f64, fs, 4 * n);
        let trace = averaged_psd(&ts, rbw, 4).unwrap();
        let peak = trace.values.iter().cloned().fold(0.0, f64::max);
        assert_relative_eq!(peak, 4.0 / (2.0 * rbw), max_relative = 1e-9);
        let m = extract_peak(&trace, 100.0 * fs / n as f64, 10).unwrap();
        assert_relative_eq!(m.signal_asd * m.signal_asd, 4.0 / (2.0 * rbw), max_relative = 1e-9);
    }

    #[test]
    fn insufficient_record_is_rejected() {
        let ts = tone(1.0, 1e3, 1e6, 1000);
        assert!(matches!(averaged_psd(&ts, 1e3, 30), Err(Error::InsufficientData(_))));
        assert!(averaged_psd(&ts, 0.0, 1).is_err());
    }

    #[test]
    fn vbw_equal_to_rbw_is_identity() {
        let trace = flat(vec![1.0, 3.0, 2.0, 5.0, 4.0], 1e3);
        let out = apply_vbw(&trace, 1e3).unwrap();
        assert_eq!(out.values, trace.values);
        assert!(apply_vbw(&trace, 2e3).is_err());
    }

    #[test]
    fn vbw_spreads_a_line_and_conserves_power() {
        let mut values = vec![0.0; 2000];
        values[500] = 100.0;
        let trace = flat(values, 1e3);
        let out = apply_vbw(&trace, 10.0).unwrap();
        assert_relative_eq!(out.integrated_power(), trace.integrated_power(), max_relative = 0.05);
        let above_half = out.values.iter().filter(|v| **v > 0.5 * 1.0).count();
        assert!((50..=100).contains(&above_half), "{above_half}");
        assert_eq!(out.vbw, 10.0);
    }

    #[test]
    fn normalisation_and_units() {
        let trace = flat(vec![4e-30; 50], 1e3);
        let rel = normalize_to_shot_noise(&trace, 2e-15).unwrap();
        assert_eq!(rel.unit, SpectrumUnit::RelativeToShotNoise);
        assert!(rel.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(matches!(
            normalize_to_shot_noise(&rel, 1.0),
            Err(Error::UnitMismatch { .. })
        ));
        let squeezed = flat(vec![0.1 * 4e-30; 50], 1e3);
        let rel = normalize_to_shot_noise(&squeezed, 2e-15).unwrap();
        assert_relative_eq!(rel.values[7], 0.1, max_relative = 1e-12);
    }

    #[test]
    fn pressure_conversion_examples() {
        assert_relative_eq!(
            asd_to_pressure(1.14e-15, 1e-3, 2.072e-9).unwrap(),
            5.501_930_5e-4,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            asd_to_pressure(2e-14, 1e-3, 2.072e-9).unwrap(),
            9.652_509_65e-3,
            max_relative = 1e-8
        );
        assert_relative_eq!(
            asd_to_pressure(2e-14, 2e-3, 2.072e-9).unwrap(),
            0.5 * asd_to_pressure(2e-14, 1e-3, 2.072e-9).unwrap(),
            max_relative = 1e-15
        );
        assert!(asd_to_pressure(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn noise_only_peak_is_clipped_to_zero() {
        let trace = flat(vec![1.0; 200], 1e3);
        let m = extract_peak(&trace, 100.0 * trace.bin_width(), 10).unwrap();
        assert_eq!(m.signal_asd, 0.0);
        assert_eq!(m.total_asd, m.noise_floor_asd);
        assert!(!m.is_visible(3.0));
    }

    #[test]
    fn peak_errors() {
        let trace = flat(vec![1.0; 200], 1e3);
        assert!(extract_peak(&trace, -5.0, 10).is_err());
        assert!(extract_peak(&trace, 1e9, 10).is_err());
        assert!(matches!(
            extract_peak(&trace, 10.0 * trace.bin_width(), 185),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn amplitude_domain_subtraction() {
        let m = PeakMeasurement {
            frequency: 0.0,
            total_asd: 5.0,
            noise_floor_asd: 3.0,
            signal_asd: 4.0,
            peak_bin_value: 25.0,
        };
        assert_eq!(m.signal_asd_in(SubtractionDomain::Power), 4.0);
        assert_eq!(m.signal_asd_in(SubtractionDomain::Amplitude), 2.0);
        assert_relative_eq!(m.peak_to_floor_db(), 20.0 * (5.0f64 / 3.0).log10());
    }

    #[test]
    fn crop_keeps_the_span() {
        let trace = flat((0..100).map(f64::from).collect(), 1.5);
        let c = trace.crop(50.0, 10.0);
        assert_eq!(c.frequencies.first(), Some(&45.0));
        assert_eq!(c.frequencies.last(), Some(&55.0));
    }
}
