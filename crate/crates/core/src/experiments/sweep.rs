//! Absorption measured from distance series, swept over frequency or
//! temperature.
//!
//! Each row moves the beam away from the transducer, reads the calibrated
//! peak power at each distance and fits the exponential decay. Distances are
//! usable as long as the peak stays visible; once it disappears the rest of
//! the grid is skipped. Rows with too few usable points on the coarse grid
//! are re-measured on a finer grid ending at the first invisible distance.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::demo::VISIBILITY_THRESHOLD_DB;
use super::fit::{fit_decay, DistanceSeries};
use super::{derive_seed, Bench};
use crate::air::{absorption_coefficient, AirState};
use crate::error::{Error, Result};
use crate::optics::AcousticScene;

/// Source pressure amplitude versus drive frequency, Pa. Linear
/// interpolation between points, constant beyond the ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceSpectrum {
    /// (frequency Hz, pressure Pa), sorted by frequency.
    pub points: Vec<(f64, f64)>,
}

impl SourceSpectrum {
    pub fn flat(pressure: f64) -> Self {
        SourceSpectrum {
            points: vec![(0.0, pressure)],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return Err(Error::invalid("points", "need at least one point"));
        }
        if self.points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid("points", "frequencies must be strictly increasing"));
        }
        if self.points.iter().any(|(_, p)| !(*p >= 0.0 && p.is_finite())) {
            return Err(Error::invalid("points", "pressures must be >= 0"));
        }
        Ok(())
    }

    pub fn pressure_at(&self, frequency: f64) -> f64 {
        let pts = &self.points;
        match pts.iter().position(|(f, _)| *f >= frequency) {
            None => pts.last().map_or(0.0, |p| p.1),
            Some(0) => pts[0].1,
            Some(i) => {
                let (f0, p0) = pts[i - 1];
                let (f1, p1) = pts[i];
                p0 + (p1 - p0) * (frequency - f0) / (f1 - f0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSettings {
    /// Coarse distance grid, mm, strictly increasing.
    pub distances: Vec<f64>,
    /// Relative RMS fluctuation of the source power between measurements.
    pub source_jitter: f64,
    /// Simulate quantum and dark noise. When false the chain is exact.
    pub quantum_noise: bool,
    /// Quantum noise variance relative to shot noise.
    pub noise_variance: f64,
    /// Minimum usable points before the grid is refined.
    pub min_points: usize,
    /// Points of the refined grid; zero disables refinement.
    pub refine_points: usize,
}

impl Default for SweepSettings {
    /// Ten distances from 0 to 7 mm, shot-noise-limited, no source jitter.
    fn default() -> Self {
        SweepSettings {
            distances: linspace(0.0, 7.0, 10),
            source_jitter: 0.0,
            quantum_noise: true,
            noise_variance: 1.0,
            min_points: 3,
            refine_points: 10,
        }
    }
}

impl SweepSettings {
    pub fn validate(&self) -> Result<()> {
        if self.distances.len() < 2 {
            return Err(Error::invalid("distances", "need at least two distances"));
        }
        if self.distances.iter().any(|d| !(*d >= 0.0 && d.is_finite()))
            || self.distances.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::invalid("distances", "must be >= 0 and strictly increasing"));
        }
        if !(self.source_jitter >= 0.0 && self.source_jitter < 1.0) {
            return Err(Error::invalid("source_jitter", "must be within [0, 1)"));
        }
        if !(self.noise_variance >= 0.0 && self.noise_variance.is_finite()) {
            return Err(Error::invalid("noise_variance", "must be >= 0"));
        }
        if self.min_points < 2 {
            return Err(Error::invalid("min_points", "must be >= 2"));
        }
        if self.refine_points == 1 {
            return Err(Error::invalid("refine_points", "must be 0 or >= 2"));
        }
        Ok(())
    }
}

pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (stop - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Fitted,
    /// Two usable points; no error estimate.
    Degenerate,
    /// Fewer than two usable points.
    Undetectable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub frequency: f64,
    pub temperature: f64,
    /// dB/mm, NaN for undetectable rows.
    pub alpha_fit: f64,
    pub alpha_err: f64,
    pub alpha_theory: f64,
    /// Distances that entered the fit, mm.
    pub distances_used: Vec<f64>,
    /// Noise-subtracted peak powers at those distances, m^2/Hz.
    pub peak_powers: Vec<f64>,
    pub refined: bool,
    pub status: RowStatus,
}

/// One absorption point per frequency at the bench air temperature.
///
/// Row `i` draws its noise from `derive_seed(master_seed, i, j)` for
/// measurement `j`, so results do not depend on scheduling.
pub fn run_frequency_sweep(
    bench: &Bench,
    frequencies: &[f64],
    source: &SourceSpectrum,
    settings: &SweepSettings,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    bench.validate()?;
    source.validate().map_err(|e| e.within("source"))?;
    settings.validate().map_err(|e| e.within("sweep"))?;
    frequencies
        .par_iter()
        .enumerate()
        .map(|(row, &f)| measure_row(bench, &bench.air, f, source.pressure_at(f), settings, master_seed, row))
        .collect()
}

/// One absorption point per temperature at a fixed frequency.
pub fn run_temperature_sweep(
    bench: &Bench,
    temperatures: &[f64],
    frequency: f64,
    source: &SourceSpectrum,
    settings: &SweepSettings,
    master_seed: u64,
) -> Result<Vec<SweepRow>> {
    bench.validate()?;
    source.validate().map_err(|e| e.within("source"))?;
    settings.validate().map_err(|e| e.within("sweep"))?;
    temperatures
        .par_iter()
        .enumerate()
        .map(|(row, &t)| {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::invalid("temperatures", format!("{t} K is not > 0")));
            }
            let air = bench.air.with_temperature(t);
            measure_row(
                bench,
                &air,
                frequency,
                source.pressure_at(frequency),
                settings,
                master_seed,
                row,
            )
        })
        .collect()
}

struct Point {
    distance: f64,
    power: f64,
    visible: bool,
}

fn measure_row(
    bench: &Bench,
    air: &AirState,
    frequency: f64,
    source_pressure: f64,
    settings: &SweepSettings,
    master_seed: u64,
    row: usize,
) -> Result<SweepRow> {
    let mut row_bench = if settings.quantum_noise {
        bench.clone()
    } else {
        bench.noiseless()
    };
    row_bench.air = *air;
    let noise_variance = if settings.quantum_noise {
        settings.noise_variance
    } else {
        0.0
    };
    let scene = AcousticScene::new(air, frequency, source_pressure, 0.0);
    let alpha_theory = absorption_coefficient(air.temperature, frequency)?.value;

    let mut index = 0u64;
    let mut jitter_rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, row as u64, u64::MAX));
    let mut measure = |d: f64| -> Result<Point> {
        let seed = derive_seed(master_seed, row as u64, index);
        index += 1;
        let z: f64 = StandardNormal.sample(&mut jitter_rng);
        let power_scale = (1.0 + settings.source_jitter * z).max(0.0);
        let (interaction, phase) = row_bench.interaction(&scene, d)?;
        let tone = super::Tone {
            amplitude: interaction.path_amplitude * power_scale.sqrt(),
            frequency,
            phase,
        };
        let m = row_bench.measure(&tone, noise_variance, seed)?;
        Ok(Point {
            distance: d,
            power: m.peak.signal_asd * m.peak.signal_asd,
            visible: m.peak.is_visible(VISIBILITY_THRESHOLD_DB) && m.peak.signal_asd > 0.0,
        })
    };

    let mut usable = visible_prefix(&settings.distances, &mut measure)?;
    let mut refined = false;
    if usable.len() < settings.min_points && settings.refine_points >= 2 {
        if let Some(&limit) = settings.distances.get(usable.len()).filter(|d| **d > 0.0) {
            let start = settings.distances[0];
            usable = visible_prefix(&linspace(start, limit, settings.refine_points), &mut measure)?;
            refined = true;
        }
    }

    let (distances, powers): (Vec<f64>, Vec<f64>) = usable.iter().map(|p| (p.distance, p.power)).unzip();
    let base = SweepRow {
        frequency,
        temperature: air.temperature,
        alpha_fit: f64::NAN,
        alpha_err: f64::NAN,
        alpha_theory,
        distances_used: distances.clone(),
        peak_powers: powers.clone(),
        refined,
        status: RowStatus::Undetectable,
    };
    if distances.len() < 2 {
        return Ok(base);
    }
    let fit = fit_decay(&DistanceSeries::new(distances, powers, frequency, air.temperature)?)?;
    Ok(SweepRow {
        alpha_fit: fit.alpha,
        alpha_err: fit.alpha_std_error,
        status: if fit.degenerate {
            RowStatus::Degenerate
        } else {
            RowStatus::Fitted
        },
        ..base
    })
}

fn visible_prefix(distances: &[f64], measure: &mut impl FnMut(f64) -> Result<Point>) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for &d in distances {
        let p = measure(d)?;
        if !p.visible {
            break;
        }
        out.push(p);
    }
    Ok(out)
}

fn write_rows(rows: &[SweepRow], path: &Path, key: &str, param: impl Fn(&SweepRow) -> f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([key, "alpha_fit_db_per_mm", "alpha_err", "alpha_theory_db_per_mm"])?;
    for r in rows {
        w.write_record([
            param(r).to_string(),
            r.alpha_fit.to_string(),
            r.alpha_err.to_string(),
            r.alpha_theory.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// `f_hz,alpha_fit_db_per_mm,alpha_err,alpha_theory_db_per_mm`
pub fn write_frequency_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_rows(rows, path, "f_hz", |r| r.frequency)
}

/// `t_k,alpha_fit_db_per_mm,alpha_err,alpha_theory_db_per_mm`
pub fn write_temperature_sweep_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    write_rows(rows, path, "t_k", |r| r.temperature)
}
