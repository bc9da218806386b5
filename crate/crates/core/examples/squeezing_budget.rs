//! Squeezed and anti-squeezed variances, the loss limit, and the inverse
//! problem of inferring loss from a measured pair.

use aosense::quantum::{
    equivalent_shot_noise_power, infer_loss_and_squeeze, quadrature_variance, squeezing_limit, SqueezerConfig,
};

fn main() -> aosense::Result<()> {
    let cfg = SqueezerConfig::default();
    let pair = quadrature_variance(&cfg);
    println!(
        "r = {}, eta = {}: squeezed {:.3} dB, anti-squeezed {:.2} dB, limit {:.2} dB",
        cfg.source_squeeze_parameter,
        cfg.total_efficiency,
        pair.squeezed.db(),
        pair.anti_squeezed.db(),
        squeezing_limit(cfg.total_efficiency).db()
    );
    let est = infer_loss_and_squeeze(pair.squeezed.value(), pair.anti_squeezed.value())?;
    println!("inferred loss {:.4}, r = {:.4}", est.loss(), est.squeeze_parameter);
    println!(
        "12 mW squeezed is worth {:.0} mW of coherent light",
        equivalent_shot_noise_power(12e-3, pair.squeezed.value())? * 1e3
    );
    for sigma in [0.0, 0.02, 0.05, 0.1] {
        let p = quadrature_variance(&SqueezerConfig {
            rms_phase_noise: sigma,
            ..cfg
        });
        println!("phase jitter {sigma:.2} rad: squeezed {:.2} dB", p.squeezed.db());
    }
    Ok(())
}
