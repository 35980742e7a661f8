//! Trap-spill survival and thermometry.

use serde::{Deserialize, Serialize};

use super::{EnsembleError, EnsembleGrid, ThermalTrap};
use crate::numerics::{fit_nonlinear, FitData, FitOptions, FitResult, NumericsError, Param};
use crate::trapmodel::TrapConfig;
use crate::units::kelvin_to_hz;

/// C̄_N measured after spilling at barrier minima ΔU_min.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpillDataset {
    /// ΔU_min as k_B-normalized energies, K.
    pub barrier_minima: Vec<f64>,
    pub cn: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl SpillDataset {
    pub fn new(barrier_minima: Vec<f64>, cn: Vec<f64>, sigma: Vec<f64>) -> Result<Self, EnsembleError> {
        let d = Self { barrier_minima, cn, sigma };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.cn.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cn.is_empty()
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        let n = self.barrier_minima.len();
        if n == 0 || self.cn.len() != n || self.sigma.len() != n {
            return Err(EnsembleError::InvalidInput("spill dataset columns empty or of unequal length".into()));
        }
        if self.barrier_minima.iter().any(|d| !(*d >= 0.0 && d.is_finite())) {
            return Err(EnsembleError::InvalidInput("barrier minima must be non-negative".into()));
        }
        if self.cn.iter().any(|c| !c.is_finite()) || self.sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(EnsembleError::InvalidInput("C_N must be finite and sigma positive".into()));
        }
        Ok(())
    }
}

/// P(ΔU_min) at temperature `t` (both in K) for the probe trap `cfg`.
///
/// Builds the trap grid on every call; use [`ThermalTrap::survival`] for scans.
pub fn survival_probability(barrier: f64, t: f64, cfg: &TrapConfig) -> Result<f64, EnsembleError> {
    if !(t > 0.0) {
        return Err(EnsembleError::InvalidInput(format!("temperature {t} K")));
    }
    let trap = ThermalTrap::new(cfg, &EnsembleGrid::default())?;
    Ok(trap.survival(kelvin_to_hz(barrier), t))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureFit {
    /// K.
    pub temperature: f64,
    pub temperature_error: f64,
    /// C̄_N without spilling.
    pub amplitude: f64,
    pub fit: FitResult,
}

/// Fits C̄_N(ΔU_min) = A · P(ΔU_min; T).
pub fn fit_temperature(data: &SpillDataset, trap: &ThermalTrap) -> Result<TemperatureFit, EnsembleError> {
    data.validate()?;
    if data.len() < 3 {
        return Err(EnsembleError::InvalidInput("temperature fit needs at least 3 points".into()));
    }
    let barriers: Vec<f64> = data.barrier_minima.iter().map(|&d| kelvin_to_hz(d)).collect();
    if barriers.iter().all(|&b| b >= trap.depth) || barriers.iter().all(|&b| b <= 0.0) {
        return Err(EnsembleError::Unidentifiable("no barrier lies inside the spill range".into()));
    }
    let model = |p: &[f64], x: &[f64]| trap.survival_curve(x, p[1]).into_iter().map(|v| p[0] * v).collect::<Vec<f64>>();
    let amp0 = data.cn.iter().cloned().fold(f64::NEG_INFINITY, f64::max).max(1e-6);
    let fd = FitData::new(&barriers, &data.cn, &data.sigma);
    let mut best: Option<FitResult> = None;
    let mut last_err = None;
    for t0 in [10e-6, 25e-6, 60e-6] {
        let params = [
            Param::new("amplitude", amp0).bounded(0.0, f64::INFINITY),
            Param::new("temperature", t0).bounded(0.1e-6, 2e-3).with_scale(10e-6),
        ];
        match fit_nonlinear(&model, fd, &params, &FitOptions::default()) {
            Ok(f) if best.as_ref().is_none_or(|b| f.chi2 < b.chi2) => best = Some(f),
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    let fit = match (best, last_err) {
        (Some(f), _) => f,
        (None, Some(NumericsError::DegenerateFit(m))) => return Err(EnsembleError::Unidentifiable(m)),
        (None, Some(e)) => return Err(e.into()),
        (None, None) => unreachable!(),
    };
    Ok(TemperatureFit {
        temperature: fit.value("temperature"),
        temperature_error: fit.error("temperature"),
        amplitude: fit.value("amplitude"),
        fit,
    })
}
