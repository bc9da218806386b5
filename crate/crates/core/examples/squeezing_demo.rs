//! A weak tone hidden in shot noise becomes visible with 10 dB of squeezing
//! and disappears with anti-squeezing.

use aosense::experiments::{run_squeezing_demo, Bench, InteractionLength};
use aosense::spectrum::SubtractionDomain;

fn main() -> aosense::Result<()> {
    let mut bench = Bench {
        interaction_length: InteractionLength::Fixed(1e-3),
        ..Bench::default()
    };
    bench.analyzer.calibration_length = Some(1e-3);
    let f = 5.204e6;
    let p = bench.pressure_for_signal_asd(0.25e-3, f);

    let demo = run_squeezing_demo(&bench, f, p, 0.1, 38.7, 7)?;
    for t in &demo.traces {
        println!(
            "{:>13}: floor {:.3} mPa/sqrt(Hz), peak - floor {:.3} mPa/sqrt(Hz), {:5.2} dB, {}",
            t.kind.label(),
            t.peak_pressure.noise_floor_asd * 1e3,
            t.peak_pressure.signal_asd_in(SubtractionDomain::Amplitude) * 1e3,
            t.peak.peak_to_floor_db(),
            if t.visible { "visible" } else { "hidden" }
        );
    }
    Ok(())
}
