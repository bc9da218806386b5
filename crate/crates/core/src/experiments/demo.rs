//! The same weak tone observed with shot-noise-limited, squeezed and
//! anti-squeezed readout.

use serde::{Deserialize, Serialize};

use super::{derive_seed, Bench};
use crate::error::Result;
use crate::spectrum::{normalize_to_shot_noise, PeakMeasurement, SpectrumTrace};

/// A peak counts as visible when it stands this far above the floor.
pub const VISIBILITY_THRESHOLD_DB: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    ShotNoise,
    Squeezed,
    AntiSqueezed,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::ShotNoise => "shot_noise",
            NoiseKind::Squeezed => "squeezed",
            NoiseKind::AntiSqueezed => "anti_squeezed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemoTrace {
    pub kind: NoiseKind,
    pub noise_variance: f64,
    /// Averaged trace relative to shot noise.
    pub trace: SpectrumTrace,
    /// Video-filtered trace relative to shot noise.
    pub display: SpectrumTrace,
    /// Peak in m/sqrt(Hz).
    pub peak: PeakMeasurement,
    /// Peak in Pa/sqrt(Hz).
    pub peak_pressure: PeakMeasurement,
    pub visible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SqueezingDemo {
    pub frequency: f64,
    pub pressure_amplitude: f64,
    /// Shot-noise ASD used for normalisation, m/sqrt(Hz).
    pub shot_asd: f64,
    pub traces: Vec<DemoTrace>,
}

impl SqueezingDemo {
    pub fn get(&self, kind: NoiseKind) -> &DemoTrace {
        self.traces
            .iter()
            .find(|t| t.kind == kind)
            .expect("all three kinds are present")
    }
}

/// Measure a tone of pressure amplitude `pressure_amplitude` (Pa, at the
/// beam) with noise variances 1, `v_squeezed` and `v_antisqueezed`.
///
/// The tone is identical in all three records; trace `k` draws its noise
/// from `derive_seed(seed, 0, k)`.
pub fn run_squeezing_demo(
    bench: &Bench,
    frequency: f64,
    pressure_amplitude: f64,
    v_squeezed: f64,
    v_antisqueezed: f64,
    seed: u64,
) -> Result<SqueezingDemo> {
    bench.validate()?;
    let tone = bench.tone_for_pressure(pressure_amplitude, frequency);
    let shot_asd = bench.shot_noise_asd()?;
    let to_pa = bench.pressure_per_displacement(frequency);

    let kinds = [
        (NoiseKind::ShotNoise, 1.0),
        (NoiseKind::Squeezed, v_squeezed),
        (NoiseKind::AntiSqueezed, v_antisqueezed),
    ];
    let traces = kinds
        .iter()
        .enumerate()
        .map(|(k, &(kind, v))| {
            let m = bench.measure(&tone, v, derive_seed(seed, 0, k as u64))?;
            Ok(DemoTrace {
                kind,
                noise_variance: v,
                trace: normalize_to_shot_noise(&m.trace, shot_asd)?,
                display: normalize_to_shot_noise(&m.display, shot_asd)?,
                peak_pressure: m.peak.scaled(to_pa),
                visible: m.peak.is_visible(VISIBILITY_THRESHOLD_DB),
                peak: m.peak,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SqueezingDemo {
        frequency,
        pressure_amplitude,
        shot_asd,
        traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn silent_scene_shows_no_peak() {
        let demo = run_squeezing_demo(&Bench::default(), 5.204e6, 0.0, 0.1, 38.7, 11).unwrap();
        assert_eq!(demo.traces.len(), 3);
        assert!(demo.traces.iter().all(|t| !t.visible));
    }

    #[test]
    fn strong_tone_is_visible_everywhere() {
        let bench = Bench::default();
        let p = bench.pressure_for_signal_asd(9e-3, 5.204e6);
        let demo = run_squeezing_demo(&bench, 5.204e6, p, 0.1, 38.7, 5).unwrap();
        assert!(demo.traces.iter().all(|t| t.visible));
        let shot = demo.get(NoiseKind::ShotNoise);
        let rel = (shot.peak_pressure.signal_asd - 9e-3).abs() / 9e-3;
        assert!(rel < 0.1, "{rel}");
    }
}
