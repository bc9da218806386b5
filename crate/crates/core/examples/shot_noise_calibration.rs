//! Shot-noise-limited displacement sensitivity and its pressure equivalent.

use aosense::air::PIEZOOPTIC_COEFFICIENT;
use aosense::quantum::shot_noise_asd;
use aosense::spectrum::asd_to_pressure;

fn main() -> aosense::Result<()> {
    println!("{:>10} {:>16} {:>18}", "power", "ASD (m/rtHz)", "z_M = 1 mm (mPa/rtHz)");
    for power in [1.2e-3, 12e-3, 48e-3, 120e-3] {
        let asd = shot_noise_asd(1550e-9, power)?;
        let pa = asd_to_pressure(asd, 1e-3, PIEZOOPTIC_COEFFICIENT)?;
        println!("{:>8.1} mW {:>16.4e} {:>18.4}", power * 1e3, asd, pa * 1e3);
    }
    Ok(())
}
