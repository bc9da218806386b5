//! Absorption coefficient versus frequency from simulated distance scans.

use aosense::experiments::{run_frequency_sweep, write_frequency_sweep_csv, Bench, SourceSpectrum, SweepSettings};

fn main() -> aosense::Result<()> {
    let settings = SweepSettings {
        source_jitter: 0.01,
        ..SweepSettings::default()
    };
    // The transducer output collapses towards 7.2 MHz.
    let source = SourceSpectrum {
        points: vec![(4.2e6, 10.0), (6.0e6, 10.0), (7.2e6, 0.137)],
    };
    let freqs = [4.2e6, 4.8e6, 5.4e6, 6.0e6, 7.2e6];
    let rows = run_frequency_sweep(&Bench::default(), &freqs, &source, &settings, 6)?;
    for r in &rows {
        println!(
            "{:.1} MHz: {:.3} +- {:.3} dB/mm (theory {:.3}), {} points up to {:.2} mm{}",
            r.frequency / 1e6,
            r.alpha_fit,
            r.alpha_err,
            r.alpha_theory,
            r.distances_used.len(),
            r.distances_used.last().unwrap_or(&0.0),
            if r.refined { ", refined grid" } else { "" }
        );
    }
    let path = std::env::temp_dir().join("aosense_sweep_freq.csv");
    write_frequency_sweep_csv(&rows, &path)?;
    println!("written to {}", path.display());
    Ok(())
}
