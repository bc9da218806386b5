//! Command-line front end. Every command writes plain CSV plus a
//! `metadata.json` sidecar echoing the complete configuration.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::air::piezooptic_coefficient;
use crate::config::{parse_config, RunConfig, RunMetadata};
use crate::error::{Error, Result};
use crate::experiments::{
    fit_decay, run_frequency_sweep, run_squeezing_demo, run_temperature_sweep, write_frequency_sweep_csv,
    write_temperature_sweep_csv, Bench, DistanceSeries, Tone, VISIBILITY_THRESHOLD_DB,
};
use crate::optics::{acoustic_pressure_at, effective_interaction_length};
use crate::quantum::{equivalent_shot_noise_power, quadrature_variance, shot_noise_asd, squeezing_limit};
use crate::spectrum::{normalize_to_shot_noise, PeakMeasurement, SpectrumTrace};

#[derive(Debug, Parser)]
#[command(name = "aosense", version, about = "Squeezed-light acousto-optic sensing simulator")]
struct Cli {
    /// JSON configuration; omitted keys take their defaults.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Unit of exported spectra.
    #[arg(long, global = true, value_enum)]
    unit: Option<Unit>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one analyzer trace of the configured scene.
    Simulate {
        /// Also dump the raw time series (f64le + JSON).
        #[arg(long)]
        timeseries: bool,
    },
    /// Shot-noise, squeezed and anti-squeezed traces of the same tone.
    SqueezeDemo,
    /// Absorption coefficient versus frequency.
    SweepFreq,
    /// Absorption coefficient versus temperature.
    SweepTemp,
    /// Print shot-noise and pressure-equivalent noise levels.
    Calibrate,
    /// Fit the absorption coefficient to a distance_mm,peak_power CSV.
    Fit {
        #[arg(value_name = "CSV")]
        input: PathBuf,
        /// Acoustic frequency of the series, Hz (reported only).
        #[arg(long)]
        frequency: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Unit {
    /// Displacement, m^2/Hz.
    M,
    /// Pressure, Pa^2/Hz.
    Pa,
    /// Relative to shot noise.
    Rel,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                1
            } else {
                2
            }
        }
    }
}

pub fn main() -> std::process::ExitCode {
    std::process::ExitCode::from(run(std::env::args_os()) as u8)
}

fn load(cli: &Cli) -> Result<RunConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            if !path.exists() {
                return Err(Error::Config {
                    path: path.display().to_string(),
                    message: "file not found".into(),
                });
            }
            parse_config(path)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<()> {
    let config = load(cli)?;
    match &cli.command {
        Command::Calibrate => calibrate(&config, &mut std::io::stdout().lock()),
        Command::Fit { input, frequency } => fit(cli, &config, input, *frequency),
        Command::Simulate { timeseries } => simulate(cli, &config, *timeseries),
        Command::SqueezeDemo => squeeze_demo(cli, &config),
        Command::SweepFreq => sweep_freq(cli, &config),
        Command::SweepTemp => sweep_temp(cli, &config),
    }
}

fn out_dir(cli: &Cli) -> Result<&Path> {
    fs::create_dir_all(&cli.out).map_err(|e| Error::io(&cli.out, e))?;
    Ok(&cli.out)
}

fn finish(cli: &Cli, command: &str, config: &RunConfig, outputs: Vec<String>) -> Result<()> {
    let dir = out_dir(cli)?;
    RunMetadata::new(command, config, outputs).write(&dir.join("metadata.json"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Trace in the requested export unit; `trace` is in m^2/Hz.
fn export_trace(bench: &Bench, frequency: f64, trace: &SpectrumTrace, unit: Unit) -> Result<SpectrumTrace> {
    match unit {
        Unit::M => Ok(trace.clone()),
        Unit::Pa => {
            let z = bench.calibration_length(bench.air.acoustic_wavelength(frequency));
            trace.to_pressure(z, piezooptic_coefficient(&bench.air).value)
        }
        Unit::Rel => normalize_to_shot_noise(trace, bench.shot_noise_asd()?),
    }
}

#[derive(Serialize)]
struct PeakReport {
    frequency_hz: f64,
    total_asd_m: f64,
    noise_floor_asd_m: f64,
    signal_asd_m: f64,
    total_asd_pa: f64,
    noise_floor_asd_pa: f64,
    signal_asd_pa: f64,
    peak_to_floor_db: f64,
    visible: bool,
}

impl PeakReport {
    fn new(peak: &PeakMeasurement, to_pa: f64) -> Self {
        let pa = peak.scaled(to_pa);
        PeakReport {
            frequency_hz: peak.frequency,
            total_asd_m: peak.total_asd,
            noise_floor_asd_m: peak.noise_floor_asd,
            signal_asd_m: peak.signal_asd,
            total_asd_pa: pa.total_asd,
            noise_floor_asd_pa: pa.noise_floor_asd,
            signal_asd_pa: pa.signal_asd,
            peak_to_floor_db: peak.peak_to_floor_db(),
            visible: peak.is_visible(VISIBILITY_THRESHOLD_DB),
        }
    }
}

fn simulate(cli: &Cli, config: &RunConfig, dump_timeseries: bool) -> Result<()> {
    let bench = config.bench();
    let scene = config.scene();
    let (interaction, phase) = bench.interaction(&scene, scene.source_position)?;
    let tone = Tone {
        amplitude: interaction.path_amplitude,
        frequency: scene.frequency,
        phase,
    };
    let v = quadrature_variance(&config.squeezer).squeezed.value();
    let m = bench.measure(&tone, v, config.seed)?;
    let unit = cli.unit.unwrap_or(Unit::M);
    let dir = out_dir(cli)?;
    let mut outputs = vec!["trace.csv".to_string(), "trace_vbw.csv".into(), "peak.json".into()];
    export_trace(&bench, tone.frequency, &m.trace, unit)?.write_csv(&dir.join("trace.csv"))?;
    export_trace(&bench, tone.frequency, &m.display, unit)?.write_csv(&dir.join("trace_vbw.csv"))?;
    let to_pa = bench.pressure_per_displacement(tone.frequency);
    write_json(&dir.join("peak.json"), &PeakReport::new(&m.peak, to_pa))?;
    if dump_timeseries {
        let ts = crate::interferometer::synthesize(
            &bench.interferometer,
            &crate::interferometer::SynthesisRequest {
                wavelength: bench.beam.wavelength,
                signal_amplitude: tone.amplitude,
                signal_frequency: tone.frequency,
                signal_phase: tone.phase,
                noise_variance: v,
                sample_rate: bench.analyzer.sample_rate,
                duration: bench.analyzer.record_duration(),
                seed: config.seed,
            },
        )?;
        ts.write_binary(&dir.join("timeseries.f64"))?;
        outputs.push("timeseries.f64".into());
        outputs.push("timeseries.f64.json".into());
    }
    println!(
        "peak at {:.0} Hz: signal {:.3e} m/sqrt(Hz) = {:.3e} Pa/sqrt(Hz), {:.2} dB over floor",
        m.peak.frequency,
        m.peak.signal_asd,
        m.peak.signal_asd * to_pa,
        m.peak.peak_to_floor_db()
    );
    finish(cli, "simulate", config, outputs)
}

#[derive(Serialize)]
struct DemoReport {
    kind: &'static str,
    noise_variance: f64,
    #[serde(flatten)]
    peak: PeakReport,
}

fn squeeze_demo(cli: &Cli, config: &RunConfig) -> Result<()> {
    let bench = config.bench();
    let scene = config.scene();
    let (pressure, _) = acoustic_pressure_at(&scene, &bench.air, scene.source_position)?;
    let pair = quadrature_variance(&config.squeezer);
    let demo = run_squeezing_demo(
        &bench,
        scene.frequency,
        pressure,
        pair.squeezed.value(),
        pair.anti_squeezed.value(),
        config.seed,
    )?;
    let unit = cli.unit.unwrap_or(Unit::Rel);
    let shot_psd = demo.shot_asd * demo.shot_asd;
    let to_pa = bench.pressure_per_displacement(scene.frequency);
    let dir = out_dir(cli)?;
    let mut outputs = Vec::new();
    let mut reports = Vec::new();
    for t in &demo.traces {
        let name = format!("{}.csv", t.kind.label());
        let trace_m = t.display.scaled(shot_psd, crate::spectrum::SpectrumUnit::Displacement);
        export_trace(&bench, scene.frequency, &trace_m, unit)?.write_csv(&dir.join(&name))?;
        outputs.push(name);
        reports.push(DemoReport {
            kind: t.kind.label(),
            noise_variance: t.noise_variance,
            peak: PeakReport::new(&t.peak, to_pa),
        });
        println!(
            "{:>13}: V = {:8.4}, peak {:6.2} dB over floor, {}",
            t.kind.label(),
            t.noise_variance,
            t.peak.peak_to_floor_db(),
            if t.visible { "visible" } else { "not visible" }
        );
    }
    write_json(&dir.join("peaks.json"), &reports)?;
    outputs.push("peaks.json".into());
    finish(cli, "squeeze-demo", config, outputs)
}

fn sweep_freq(cli: &Cli, config: &RunConfig) -> Result<()> {
    let rows = run_frequency_sweep(
        &config.bench(),
        &config.sweep.frequencies,
        &config.sweep.source(),
        &config.sweep.settings(),
        config.seed,
    )?;
    let dir = out_dir(cli)?;
    write_frequency_sweep_csv(&rows, &dir.join("sweep_freq.csv"))?;
    for r in &rows {
        println!(
            "{:>9.4} MHz: alpha = {:.4} +- {:.4} dB/mm (theory {:.4}), {} points",
            r.frequency / 1e6,
            r.alpha_fit,
            r.alpha_err,
            r.alpha_theory,
            r.distances_used.len()
        );
    }
    finish(cli, "sweep-freq", config, vec!["sweep_freq.csv".into()])
}

fn sweep_temp(cli: &Cli, config: &RunConfig) -> Result<()> {
    let frequency = config
        .sweep
        .temperature_sweep_frequency
        .unwrap_or(config.scene.frequency);
    let rows = run_temperature_sweep(
        &config.bench(),
        &config.sweep.temperatures,
        frequency,
        &config.sweep.source(),
        &config.sweep.settings(),
        config.seed,
    )?;
    let dir = out_dir(cli)?;
    write_temperature_sweep_csv(&rows, &dir.join("sweep_temp.csv"))?;
    for r in &rows {
        println!(
            "{:>7.2} K: alpha = {:.4} +- {:.4} dB/mm (theory {:.4})",
            r.temperature, r.alpha_fit, r.alpha_err, r.alpha_theory
        );
    }
    finish(cli, "sweep-temp", config, vec!["sweep_temp.csv".into()])
}

/// Print the calibration chain for `config`.
pub fn calibrate(config: &RunConfig, out: &mut impl Write) -> Result<()> {
    let bench = config.bench();
    let air = bench.air;
    let wavelength = bench.beam.wavelength;
    let p_in = bench.interferometer.input_power;
    let shot_in = shot_noise_asd(wavelength, p_in)?;
    let shot_det = bench.shot_noise_asd()?;
    let dn_dp = piezooptic_coefficient(&air).value;
    let frequency = config.scene.frequency;
    let lambda_ac = air.acoustic_wavelength(frequency);
    let z_model = effective_interaction_length(&bench.beam, lambda_ac);
    let z_cal = bench.calibration_length(lambda_ac);
    let pair = quadrature_variance(&config.squeezer);
    let w = |e: std::io::Error| Error::io("<stdout>", e);

    writeln!(
        out,
        "shot-noise ASD at {:.3} mW input: {:.3e} m/sqrt(Hz)",
        p_in * 1e3,
        shot_in
    )
    .map_err(w)?;
    writeln!(
        out,
        "shot-noise ASD at {:.3} mW detected: {:.3e} m/sqrt(Hz)",
        bench.interferometer.detected_power() * 1e3,
        shot_det
    )
    .map_err(w)?;
    writeln!(
        out,
        "pressure equivalent with z_M = 1 mm: {:.3} mPa/sqrt(Hz)",
        shot_in / (1e-3 * dn_dp) * 1e3
    )
    .map_err(w)?;
    writeln!(
        out,
        "acoustic wavelength at {:.4} MHz: {:.2} um; modelled z_M = {:.4} mm{}",
        frequency / 1e6,
        lambda_ac * 1e6,
        z_model.value * 1e3,
        if z_model.divergent { " (span-clipped)" } else { "" }
    )
    .map_err(w)?;
    writeln!(
        out,
        "pressure equivalent with calibration z_M = {:.4} mm: {:.3} mPa/sqrt(Hz) input, {:.3} mPa/sqrt(Hz) detected",
        z_cal * 1e3,
        shot_in / (z_cal * dn_dp) * 1e3,
        shot_det / (z_cal * dn_dp) * 1e3
    )
    .map_err(w)?;
    writeln!(
        out,
        "squeezed / anti-squeezed variance: {:.2} dB / {:.2} dB; loss limit {:.2} dB",
        pair.squeezed.db(),
        pair.anti_squeezed.db(),
        squeezing_limit(config.squeezer.total_efficiency).db()
    )
    .map_err(w)?;
    writeln!(
        out,
        "squeezed readout matches the SNR of {:.1} mW without squeezing",
        equivalent_shot_noise_power(p_in, pair.squeezed.value())? * 1e3
    )
    .map_err(w)?;
    Ok(())
}

fn fit(cli: &Cli, config: &RunConfig, input: &Path, frequency: Option<f64>) -> Result<()> {
    let mut reader = csv::Reader::from_path(input).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(input, io),
        other => Error::Config {
            path: input.display().to_string(),
            message: format!("{other:?}"),
        },
    })?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Config {
                path: input.display().to_string(),
                message: format!("missing column `{name}`"),
            })
    };
    let (di, pi) = (col("distance_mm")?, col("peak_power")?);
    let mut distances = Vec::new();
    let mut powers = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |i: usize, name: &str| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| Error::Config {
                    path: input.display().to_string(),
                    message: format!("row {}: `{name}` is not a number", line + 2),
                })
        };
        distances.push(parse(di, "distance_mm")?);
        powers.push(parse(pi, "peak_power")?);
    }
    let frequency = frequency.unwrap_or(config.scene.frequency);
    let series = DistanceSeries::new(distances, powers, frequency, config.air.temperature)?;
    let result = fit_decay(&series)?;
    let dir = out_dir(cli)?;
    write_json(&dir.join("fit.json"), &result)?;
    println!(
        "alpha = {:.5} +- {:.5} dB/mm over {} points{}",
        result.alpha,
        result.alpha_std_error,
        series.distances.len(),
        if result.degenerate {
            " (two points, no error estimate)"
        } else {
            ""
        }
    );
    finish(cli, "fit", config, vec!["fit.json".into()])
}
