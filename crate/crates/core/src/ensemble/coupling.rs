//! Density-weighted atom–resonator coupling and atom number.

use serde::{Deserialize, Serialize};

use super::{EnsembleError, ScalarField3D, ThermalTrap};
use crate::cavity::ResonatorParams;
use crate::trapmodel::Position;

/// g(r) = g_ref e^{−k(z − z_ref)/2} √cos(qx): the probe-mode amplitude
/// following the square root of its evanescent intensity. Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingProfile {
    pub g_ref: f64,
    /// Intensity decay constant, 1/m.
    pub decay: f64,
    pub z_ref: f64,
    pub transverse_wavenumber: f64,
}

impl CouplingProfile {
    /// Profile with the trap's evanescent decay, referenced to the trap bottom.
    pub fn for_trap(trap: &ThermalTrap, g_ref: f64) -> Self {
        Self {
            g_ref,
            decay: trap.config.evanescent_decay,
            z_ref: trap.center.z,
            transverse_wavenumber: trap.config.transverse_wavenumber,
        }
    }

    /// Rescales g_ref so the cloud at `temperature` has single-atom cooperativity `c1`.
    pub fn calibrated(
        trap: &ThermalTrap,
        temperature: f64,
        c1: f64,
        rp: &ResonatorParams,
    ) -> Result<Self, EnsembleError> {
        if !(c1 > 0.0) {
            return Err(EnsembleError::InvalidInput(format!("target C1 = {c1}")));
        }
        let unit = Self::for_trap(trap, 1.0);
        let (_, c1_unit) = mean_coupling(trap, temperature, &unit, rp);
        Ok(Self::for_trap(trap, (c1 / c1_unit).sqrt()))
    }
}

impl ScalarField3D for CouplingProfile {
    fn value(&self, p: &Position) -> f64 {
        let c = (self.transverse_wavenumber * p.x).cos().max(0.0);
        self.g_ref * (-0.5 * self.decay * (p.z - self.z_ref)).exp() * c.sqrt()
    }
}

/// Position-independent coupling g₀, Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformCoupling(pub f64);

impl ScalarField3D for UniformCoupling {
    fn value(&self, _p: &Position) -> f64 {
        self.0
    }
}

/// (ḡ, C̄₁) with ḡ² the density-weighted mean of g² and C̄₁ = 4ḡ²/(κΓ₀).
pub fn mean_coupling<G: ScalarField3D>(
    trap: &ThermalTrap,
    temperature: f64,
    profile: &G,
    rp: &ResonatorParams,
) -> (f64, f64) {
    let g2 = trap.density_mean(temperature, &|p: &Position| profile.value(p).powi(2));
    let g = g2.sqrt();
    (g, 4.0 * g2 / (rp.kappa() * rp.gamma0))
}

/// N̄ = C̄_N / C̄₁.
pub fn atom_number(cn_mean: f64, c1_mean: f64) -> Result<f64, EnsembleError> {
    if !(c1_mean > 0.0) || !c1_mean.is_finite() {
        return Err(EnsembleError::InvalidInput(format!("single-atom cooperativity {c1_mean} must be positive")));
    }
    Ok(cn_mean / c1_mean)
}
