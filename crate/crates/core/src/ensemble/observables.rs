use super::EnsembleError;
use crate::spinmotion::{axis_energies, trap_axis_potential_with, Axis, AxisResolution};
use crate::trapmodel::TrapConfig;
use crate::units::kelvin_to_hz;

/// Boltzmann-weighted mean level index over `energies` (Hz, ascending) at temperature `t` (K).
pub fn thermal_mean_level(energies: &[f64], t: f64) -> f64 {
    if energies.is_empty() || !(t > 0.0) {
        return 0.0;
    }
    let kt = kelvin_to_hz(t);
    let e0 = energies[0];
    let (mut z, mut s) = (0.0, 0.0);
    for (n, e) in energies.iter().enumerate() {
        let w = (-(e - e0) / kt).exp();
        z += w;
        s += n as f64 * w;
    }
    s / z
}

/// (ν̄_x, ν̄_y, ν̄_z) over the bound states of each axis cut of `cfg`.
pub fn mean_vibrational_numbers(t: f64, cfg: &TrapConfig) -> Result<[f64; 3], EnsembleError> {
    mean_vibrational_numbers_with(t, cfg, &AxisResolution::default())
}

pub fn mean_vibrational_numbers_with(
    t: f64,
    cfg: &TrapConfig,
    res: &AxisResolution,
) -> Result<[f64; 3], EnsembleError> {
    let mut out = [0.0; 3];
    for (slot, axis) in out.iter_mut().zip([Axis::X, Axis::Y, Axis::Z]) {
        let cut = trap_axis_potential_with(axis, cfg, res)?;
        let e = axis_energies(&cut, None)?;
        if e.len() < 2 {
            return Err(EnsembleError::DegenerateAxis(axis.name()));
        }
        *slot = thermal_mean_level(&e, t);
    }
    Ok(out)
}
