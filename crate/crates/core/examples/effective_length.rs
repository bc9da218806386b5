//! Wash-out of the acoustic grating by the Gaussian beam and the resulting
//! effective interaction length.

use aosense::optics::{effective_interaction_length, washout_factor, GaussianBeam};

fn main() {
    let beam = GaussianBeam::default();
    println!(
        "waist {:.0} um, Rayleigh range {:.3} mm",
        beam.waist_radius * 1e6,
        beam.rayleigh_range() * 1e3
    );
    for (label, lambda) in [
        ("61 um", 61e-6),
        ("343 m/s @ 5.204 MHz", 343.0 / 5.204e6),
        ("30.5 um", 30.5e-6),
    ] {
        let z = effective_interaction_length(&beam, lambda);
        println!(
            "Lambda = {label:>20}: W(w0) = {:.4}, z_M = {:.4} mm{}",
            washout_factor(beam.waist_radius, lambda),
            z.value * 1e3,
            if z.divergent { " (span-clipped)" } else { "" }
        );
    }
}
