//! Fitting the absorption coefficient to peak powers measured at several
//! distances.

use aosense::experiments::{fit_decay, DistanceSeries};

fn main() -> aosense::Result<()> {
    let alpha = 4.305;
    let distances: Vec<f64> = (0..10).map(|k| k as f64 * 7.0 / 9.0).collect();
    let wobble = [1.01, 0.99, 1.0, 1.02, 0.98, 1.0, 1.01, 0.99, 1.0, 1.01];
    let powers = distances
        .iter()
        .zip(wobble)
        .map(|(d, w)| 1e-26 * 10f64.powf(-alpha * d / 10.0) * w)
        .collect();
    let series = DistanceSeries::new(distances, powers, 5.204e6, 293.15)?;
    let fit = fit_decay(&series)?;
    println!(
        "alpha = {:.4} +- {:.4} dB/mm (true {alpha}), residual RMS {:.4} dB",
        fit.alpha, fit.alpha_std_error, fit.residual_rms
    );
    Ok(())
}
