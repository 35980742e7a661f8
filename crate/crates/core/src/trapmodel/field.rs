//! Vector light shift as a fictitious magnetic field, and the spin-dependent potential.

use serde::{Deserialize, Serialize};

use super::potential::{barrier_intensity, total_potential};
use super::{Position, TrapConfig, TrapError};
use crate::units::MU_B_OVER_H;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FictitiousField {
    /// Tesla.
    pub magnitude: f64,
    /// Unit vector; the evanescent mode's circulation fixes it to −x̂.
    pub direction: [f64; 3],
}

impl FictitiousField {
    pub fn vector(&self) -> [f64; 3] {
        self.direction.map(|d| d * self.magnitude)
    }
}

/// ξ = [(κ² − 4β²)/(κ² + 4β²)] · 2E_yE_z/(E_y² + E_z²), with `field_ratio` = E_y/E_z.
pub fn xi_coefficient(kappa: f64, beta: f64, field_ratio: f64) -> f64 {
    let standing = (kappa * kappa - 4.0 * beta * beta) / (kappa * kappa + 4.0 * beta * beta);
    let circular = 2.0 * field_ratio / (1.0 + field_ratio * field_ratio);
    standing * circular
}

/// B_fict = ξ · scale · (barrier power) · e^{−k_ev z} cos(qx), along −x̂.
pub fn fictitious_field(p: &Position, cfg: &TrapConfig) -> FictitiousField {
    FictitiousField {
        magnitude: cfg.xi.abs() * cfg.fictitious_scale * cfg.barrier_power * barrier_intensity(p, cfg),
        direction: [-1.0, 0.0, 0.0],
    }
}

/// g_F μ_B m_F B in Hz.
pub fn zeeman_shift(m_f: i32, field: f64, cfg: &TrapConfig) -> f64 {
    cfg.g_f * MU_B_OVER_H * m_f as f64 * field
}

/// U_tot + g_F μ_B m_F |B₀ ŷ + B_fict x̂| for spin projected on the local field.
pub fn full_spin_potential(p: &Position, m_f: i32, cfg: &TrapConfig) -> Result<f64, TrapError> {
    if m_f.abs() > cfg.hyperfine_f {
        return Err(TrapError::InvalidConfig(format!("|m_F| = {} exceeds F = {}", m_f.abs(), cfg.hyperfine_f)));
    }
    let u = total_potential(p, cfg)?;
    if m_f == 0 {
        return Ok(u);
    }
    let bf = fictitious_field(p, cfg).magnitude;
    let b = cfg.bias_field.hypot(bf);
    Ok(u + zeeman_shift(m_f, b, cfg))
}
