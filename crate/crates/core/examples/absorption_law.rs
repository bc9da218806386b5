//! Ultrasonic absorption in air and the pressure left after a few millimetres.

use aosense::air::{absorption_coefficient, attenuated_pressure};

fn main() -> aosense::Result<()> {
    for t in [291.15, 293.15, 318.15, 345.15] {
        let row: Vec<String> = [4.2e6, 5.204e6, 6.0e6, 7.2e6]
            .iter()
            .map(|&f| absorption_coefficient(t, f).map(|a| format!("{:7.3}", a.value)))
            .collect::<aosense::Result<_>>()?;
        println!(
            "T = {t:6.2} K  alpha(4.2, 5.204, 6.0, 7.2 MHz) = {} dB/mm",
            row.join(" ")
        );
    }
    let a = absorption_coefficient(293.15, 5.204e6)?;
    for d in [0.0, 1.0, 3.0, 7.0] {
        println!(
            "5.204 MHz, {d} mm: pressure x{:.4}, power x{:.2e}",
            attenuated_pressure(1.0, a.value, d),
            a.power_factor(d)
        );
    }
    Ok(())
}
