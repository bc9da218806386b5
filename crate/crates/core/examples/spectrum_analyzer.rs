//! A calibrated analyzer trace: a tone reading 9 mPa/sqrt(Hz) on top of shot
//! noise, measured with RBW 1 kHz, VBW 10 Hz and 30 averages.

use aosense::experiments::{Bench, InteractionLength};

fn main() -> aosense::Result<()> {
    let mut bench = Bench {
        interaction_length: InteractionLength::Fixed(1e-3),
        ..Bench::default()
    };
    bench.analyzer.calibration_length = Some(1e-3);
    let f = 5.204e6;

    let p = bench.pressure_for_signal_asd(9e-3, f);
    let m = bench.measure(&bench.tone_for_pressure(p, f), 1.0, 1)?;
    let to_pa = bench.pressure_per_displacement(f);
    println!("source pressure at the beam: {p:.4} Pa");
    println!(
        "peak {:.3e} m/sqrt(Hz) = {:.3} mPa/sqrt(Hz), floor {:.3} mPa/sqrt(Hz), tone RMS {:.3} pm",
        m.peak.signal_asd,
        m.peak.signal_asd * to_pa * 1e3,
        m.peak.noise_floor_asd * to_pa * 1e3,
        m.peak.signal_asd * m.trace.rbw.sqrt() * 1e12
    );

    let path = std::env::temp_dir().join("aosense_spectrum.csv");
    m.display.write_csv(&path)?;
    println!("VBW-filtered trace written to {}", path.display());
    Ok(())
}
