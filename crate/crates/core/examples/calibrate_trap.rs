//! Re-runs the trap calibration and prints the fitted constants.

use ringtrap::trapmodel::{calibrate, CalibrationTargets, TrapConfig};
use ringtrap::units::hz_to_microkelvin;

fn main() {
    let t0 = std::time::Instant::now();
    let cal = calibrate(&TrapConfig::default(), &CalibrationTargets::default()).expect("calibration");
    let c = &cal.config;
    println!("near_field_depth_uK  {:.9e}", hz_to_microkelvin(c.near_field_depth));
    println!("near_field_length    {:.9e}", c.near_field_length);
    println!("near_field_waist     {:.9e}", c.near_field_waist);
    println!("barrier_peak_uK      {:.9e}", hz_to_microkelvin(c.barrier_peak));
    println!("evanescent_decay     {:.9e}", c.evanescent_decay);
    println!("fictitious_scale     {:.9e}", c.fictitious_scale);
    println!("zc_full {:.6e} zc_probe {:.6e} depth_uK {:.6}", cal.zc_full, cal.zc_probe, hz_to_microkelvin(cal.probe_depth));
    println!("ground_spacing {:.6} nu_x {:.6} raman {:.6}", cal.ground_spacing, cal.nu_x, cal.median_raman_rate);
    println!("elapsed {:?}", t0.elapsed());
}
