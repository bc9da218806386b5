//! Absorption coefficient versus air temperature at 5.204 MHz.

use aosense::experiments::{linspace, run_temperature_sweep, Bench, SourceSpectrum, SweepSettings};

fn main() -> aosense::Result<()> {
    let temps = linspace(291.15, 345.15, 7);
    let settings = SweepSettings {
        source_jitter: 0.01,
        ..SweepSettings::default()
    };
    let rows = run_temperature_sweep(
        &Bench::default(),
        &temps,
        5.204e6,
        &SourceSpectrum::flat(10.0),
        &settings,
        2,
    )?;
    for r in &rows {
        println!(
            "{:6.2} K ({:4.1} C): {:.3} +- {:.3} dB/mm (theory {:.3})",
            r.temperature,
            r.temperature - 273.15,
            r.alpha_fit,
            r.alpha_err,
            r.alpha_theory
        );
    }
    Ok(())
}
