//! Scalar potentials, E/h in Hz.

use super::{Position, TrapConfig, TrapError};
use crate::numerics::golden_min;

/// Lower edge of the Casimir–Polder fit's validity.
pub const CP_MIN_Z: f64 = 50e-9;

/// Free-space Gaussian guide beam focused at the membrane plane z = 0.
pub fn guide_potential(p: &Position, cfg: &TrapConfig) -> f64 {
    let zr = cfg.rayleigh_range();
    let w2 = cfg.guide_waist * cfg.guide_waist * (1.0 + (p.z / zr).powi(2));
    let ratio = cfg.guide_waist * cfg.guide_waist / w2;
    -cfg.guide_depth * ratio * (-2.0 * (p.x * p.x + p.y * p.y) / w2).exp()
}

/// Near-field focus of the guide light just above the waveguide.
pub fn near_field_potential(p: &Position, cfg: &TrapConfig) -> f64 {
    let l = cfg.near_field_length;
    let wx = cfg.near_field_waist;
    let w0 = cfg.guide_waist;
    -cfg.near_field_depth
        * (-2.0 * (p.z * p.z / (l * l) + p.x * p.x / (wx * wx) + p.y * p.y / (w0 * w0))).exp()
}

/// Normalized evanescent intensity e^{-k_ev z} cos(qx); zero outside the waveguide window.
pub fn barrier_intensity(p: &Position, cfg: &TrapConfig) -> f64 {
    if p.x.abs() >= cfg.transverse_half_width() {
        return 0.0;
    }
    (-cfg.evanescent_decay * p.z).exp() * (cfg.transverse_wavenumber * p.x).cos()
}

/// Repulsive evanescent barrier, including the standing-wave corrugation along y.
pub fn barrier_potential(p: &Position, cfg: &TrapConfig) -> Result<f64, TrapError> {
    if p.x.abs() >= cfg.transverse_half_width() {
        return Err(TrapError::Domain(format!(
            "|x| = {:e} m outside the barrier window {:e} m",
            p.x.abs(),
            cfg.transverse_half_width()
        )));
    }
    let kb = 2.0 * std::f64::consts::PI * cfg.effective_index() / cfg.barrier_wavelength;
    let corrugation = 1.0 + cfg.corrugation_visibility * (2.0 * kb * p.y).sin();
    Ok(cfg.barrier_power * cfg.barrier_peak * barrier_intensity(p, cfg) * corrugation)
}

/// Casimir–Polder attraction C4/(z̃³(z̃ + λ̃)), z̃ = z − z0.
pub fn casimir_polder(z: f64, cfg: &TrapConfig) -> Result<f64, TrapError> {
    if !(z >= CP_MIN_Z) {
        return Err(TrapError::Domain(format!("z = {z:e} m below the Casimir-Polder validity limit")));
    }
    let zt = z - cfg.cp_z0;
    Ok(cfg.cp_c4 / (zt * zt * zt * (zt + cfg.cp_lambda_bar)))
}

/// Guide + near-field + barrier + Casimir–Polder.
pub fn total_potential(p: &Position, cfg: &TrapConfig) -> Result<f64, TrapError> {
    Ok(guide_potential(p, cfg) + near_field_potential(p, cfg) + barrier_potential(p, cfg)? + casimir_polder(p.z, cfg)?)
}

/// Visibility of the barrier's standing-wave corrugation,
/// v = [4κβ/(κ² + 4β²)](1 − 2|E_y|²/|E|²).
pub fn corrugation_visibility(kappa: f64, beta: f64, ey_fraction: f64) -> f64 {
    4.0 * kappa * beta / (kappa * kappa + 4.0 * beta * beta) * (1.0 - 2.0 * ey_fraction)
}

/// |E_y|²/|E|² for a field ratio E_y/E_z.
pub fn ey_fraction(field_ratio: f64) -> f64 {
    field_ratio * field_ratio / (1.0 + field_ratio * field_ratio)
}

/// Outer end of the on-axis search for the trap center.
pub const Z_SEARCH_MAX: f64 = 3.0e-6;
const Z_SCAN_STEP: f64 = 2e-9;

fn axis_scan(cfg: &TrapConfig) -> Result<(Vec<f64>, Vec<f64>), TrapError> {
    let n = ((Z_SEARCH_MAX - CP_MIN_Z) / Z_SCAN_STEP).round() as usize + 1;
    let zs: Vec<f64> = (0..n).map(|i| CP_MIN_Z + (Z_SEARCH_MAX - CP_MIN_Z) * i as f64 / (n - 1) as f64).collect();
    let us = zs
        .iter()
        .map(|&z| total_potential(&Position::new(0.0, 0.0, z), cfg))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((zs, us))
}

/// Number of interior local minima of U_tot(0, 0, z) on the search range.
pub fn axial_minimum_count(cfg: &TrapConfig) -> Result<usize, TrapError> {
    let (_, us) = axis_scan(cfg)?;
    let slopes: Vec<f64> = us.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(slopes.windows(2).filter(|s| s[0] < 0.0 && s[1] >= 0.0).count())
}

/// On-axis trap center z_c and U_tot(0, 0, z_c).
pub fn trap_center(cfg: &TrapConfig) -> Result<(f64, f64), TrapError> {
    cfg.validate()?;
    let (zs, us) = axis_scan(cfg)?;
    let (i, _) = us
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &u)| if u < acc.1 { (i, u) } else { acc });
    if i == 0 || i == zs.len() - 1 {
        return Err(TrapError::NoMinimum(format!(
            "U_tot(0,0,z) has no interior minimum in [{CP_MIN_Z:e}, {Z_SEARCH_MAX:e}] m at barrier power {}",
            cfg.barrier_power
        )));
    }
    let f = |z: f64| total_potential(&Position::new(0.0, 0.0, z), cfg).unwrap_or(f64::INFINITY);
    Ok(golden_min(f, zs[i - 1], zs[i + 1], 1e-14))
}

/// Trap depth −U_tot(0, 0, z_c) relative to the far field.
pub fn trap_depth(cfg: &TrapConfig) -> Result<f64, TrapError> {
    let (_, u0) = trap_center(cfg)?;
    Ok(-u0)
}
