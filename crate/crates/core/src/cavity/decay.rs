//! Superradiant decay after pulse extinction.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use super::{CavityError, DecayDataset, ResonatorParams};
use crate::numerics::{fit_nonlinear, FitData, FitOptions, FitResult, Param};

/// Default fit window after pulse extinction, s.
pub const DEFAULT_DECAY_WINDOW: (f64, f64) = (0.0, 35e-9);

/// Γ/Γ₀ = 1 + η C̄_N.
pub fn decay_rate_model(cn_mean: f64, rp: &ResonatorParams) -> f64 {
    1.0 + rp.eta() * cn_mean
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Γ, Hz.
    pub gamma: f64,
    pub gamma_error: f64,
    /// Γ/Γ₀.
    pub ratio: f64,
    pub ratio_error: f64,
    pub fit: FitResult,
}

/// Fits A·e^{−2πΓt} + background to the counts in `window`, with Poisson
/// weights σ = √max(count, 1) and the dataset's background held fixed.
pub fn fit_pulsed_decay(
    data: &DecayDataset,
    rp: &ResonatorParams,
    window: (f64, f64),
) -> Result<DecayFit, CavityError> {
    data.validate()?;
    rp.validate()?;
    let (t0, t1) = window;
    if !(t0 >= 0.0 && t1 > t0) {
        return Err(CavityError::Data(format!("invalid fit window [{t0}, {t1}]")));
    }
    let idx: Vec<usize> = (0..data.times.len()).filter(|&i| data.times[i] >= t0 && data.times[i] <= t1).collect();
    if idx.len() < 3 {
        return Err(CavityError::Data("fewer than 3 bins inside the fit window".into()));
    }
    let t: Vec<f64> = idx.iter().map(|&i| data.times[i] - t0).collect();
    let y: Vec<f64> = idx.iter().map(|&i| data.counts[i]).collect();
    let s: Vec<f64> = y.iter().map(|c| c.max(1.0).sqrt()).collect();
    let bg = data.background;
    let expected_bg = bg * y.len() as f64;
    let excess = y.iter().sum::<f64>() - expected_bg;
    if excess <= 3.0 * expected_bg.max(1.0).sqrt() {
        return Err(CavityError::InsufficientSignal(format!(
            "{excess:.1} counts above background in window (background {expected_bg:.1})"
        )));
    }

    let a0 = (y[0] - bg).max(1.0);
    let g0 = 2.0 * rp.gamma0;
    let params = [
        Param::new("amplitude", a0).bounded(0.0, f64::INFINITY),
        Param::new("gamma", g0).bounded(1e-3 * rp.gamma0, 1e3 * rp.gamma0),
    ];
    let model = |p: &[f64], x: &[f64]| x.iter().map(|&ti| p[0] * (-TAU * p[1] * ti).exp() + bg).collect::<Vec<f64>>();
    let fit = fit_nonlinear(&model, FitData::new(&t, &y, &s), &params, &FitOptions::default())?;
    let gamma = fit.value("gamma");
    let gamma_error = fit.error("gamma");
    Ok(DecayFit { gamma, gamma_error, ratio: gamma / rp.gamma0, ratio_error: gamma_error / rp.gamma0, fit })
}
