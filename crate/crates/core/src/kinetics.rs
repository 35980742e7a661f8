//! Trap-loss rate equations and lifetime fits.
//!
//! With the density tied to the atom number at fixed volume, n = n₀ N̄/N₀,
//! the relative population x = N̄/N₀ obeys
//! dx/dt = −x/τ − L₂n₀ x² − L₃n₀² x³.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cavity::{transmission_to_cn, CavityError, ResonatorParams};
use crate::numerics::{fit_nonlinear, integrate_ode, FitData, FitOptions, FitResult, NumericsError, Param};
use crate::units::{CM3_PER_S, CM6_PER_S, PER_CM3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossModel {
    /// One-body lifetime, s.
    pub tau: f64,
    /// Two-body coefficient, m³/s.
    pub l2: f64,
    /// Three-body coefficient, m⁶/s.
    pub l3: f64,
    /// Initial peak density, m⁻³.
    pub n0: f64,
    /// Initial atom number (or any quantity proportional to it).
    pub n_initial: f64,
}

impl LossModel {
    pub fn one_body(tau: f64) -> Self {
        Self { tau, l2: 0.0, l3: 0.0, n0: NOMINAL_DENSITY, n_initial: 1.0 }
    }

    /// τ = 230 ms, L₃ = 2.6e-25 cm⁶/s, n₀ = 1e13 cm⁻³.
    pub fn nominal_three_body() -> Self {
        Self { l3: 2.6e-25 * CM6_PER_S, ..Self::one_body(0.230) }
    }

    pub fn with_l2(mut self, l2: f64) -> Self {
        self.l2 = l2;
        self
    }

    pub fn with_l3(mut self, l3: f64) -> Self {
        self.l3 = l3;
        self
    }

    /// Two-body loss rate L₂n₀ at t = 0, 1/s.
    pub fn two_body_rate(&self) -> f64 {
        self.l2 * self.n0
    }

    /// Three-body loss rate L₃n₀² at t = 0, 1/s.
    pub fn three_body_rate(&self) -> f64 {
        self.l3 * self.n0 * self.n0
    }

    /// −(1/N̄) dN̄/dt at t = 0.
    pub fn initial_decay_rate(&self) -> f64 {
        1.0 / self.tau + self.two_body_rate() + self.three_body_rate()
    }

    pub fn validate(&self) -> Result<(), KineticsError> {
        let ok = self.tau > 0.0
            && self.tau.is_finite()
            && self.l2 >= 0.0
            && self.l3 >= 0.0
            && self.n0 > 0.0
            && self.n_initial > 0.0
            && self.l2.is_finite()
            && self.l3.is_finite();
        if !ok {
            return Err(KineticsError::InvalidModel(format!("{self:?}")));
        }
        Ok(())
    }
}

/// n₀ = 1e13 cm⁻³.
pub const NOMINAL_DENSITY: f64 = 1e13 * PER_CM3;
/// L₂ = 1e-11 cm³/s (F = 4).
pub const L2_F4: f64 = 1e-11 * CM3_PER_S;
/// L₂ = 2.8e-12 cm³/s (|4, −4⟩).
pub const L2_F4_STRETCHED: f64 = 2.8e-12 * CM3_PER_S;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    One,
    OneTwo,
    OneThree,
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::One => "one",
            ModelFamily::OneTwo => "one+two",
            ModelFamily::OneThree => "one+three",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one" => Some(ModelFamily::One),
            "one+two" | "one_two" => Some(ModelFamily::OneTwo),
            "one+three" | "one_three" => Some(ModelFamily::OneThree),
            _ => None,
        }
    }
}

/// Time series `(t, value, σ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    /// s.
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl TimeSeries {
    pub fn new(times: Vec<f64>, values: Vec<f64>, sigmas: Vec<f64>) -> Result<Self, KineticsError> {
        let s = Self { times, values, sigmas };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn validate(&self) -> Result<(), KineticsError> {
        let n = self.times.len();
        if n == 0 || self.values.len() != n || self.sigmas.len() != n {
            return Err(KineticsError::Data("time series columns empty or of unequal length".into()));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) || self.times[0] < 0.0 {
            return Err(KineticsError::Data("times must increase from t >= 0".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) || self.sigmas.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(KineticsError::Data("values must be finite and sigmas positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KineticsError {
    #[error("invalid loss model: {0}")]
    InvalidModel(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("model family {0} is underdetermined by the data")]
    Underdetermined(String),
    #[error(transparent)]
    Cavity(#[from] CavityError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// x(t) = N̄(t)/N₀ in closed form for models with at most one multi-body term.
fn relative_population(t: f64, tau: f64, b2: f64, b3: f64) -> f64 {
    let e = (-t / tau).exp();
    if b3 == 0.0 {
        // Bernoulli equation with n = 2
        e / (1.0 + b2 * tau * (1.0 - e))
    } else {
        let a = b3 * tau;
        1.0 / ((1.0 + a) / (e * e) - a).sqrt()
    }
}

/// N̄ on `t_grid` (s, increasing from 0).
///
/// Closed forms cover the one-, one+two- and one+three-body models; with
/// both L₂ and L₃ non-zero the rate equation is integrated numerically.
pub fn evolve_atom_number(lm: &LossModel, t_grid: &[f64]) -> Result<Vec<f64>, KineticsError> {
    lm.validate()?;
    if t_grid.is_empty() || t_grid[0] < 0.0 || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(KineticsError::Data("time grid must increase from t >= 0".into()));
    }
    let (b2, b3) = (lm.two_body_rate(), lm.three_body_rate());
    if b2 == 0.0 || b3 == 0.0 {
        return Ok(t_grid.iter().map(|&t| lm.n_initial * relative_population(t, lm.tau, b2, b3)).collect());
    }
    evolve_atom_number_ode(lm, t_grid, 1e-10)
}

/// N̄ on `t_grid` by adaptive integration of the full rate equation.
pub fn evolve_atom_number_ode(lm: &LossModel, t_grid: &[f64], tol: f64) -> Result<Vec<f64>, KineticsError> {
    lm.validate()?;
    let (b2, b3, tau) = (lm.two_body_rate(), lm.three_body_rate(), lm.tau);
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        let x = y[0];
        dy[0] = -x / tau - b2 * x * x - b3 * x * x * x;
    };
    let mut grid = t_grid.to_vec();
    let prepend = grid.first().is_some_and(|&t| t > 0.0);
    if prepend {
        grid.insert(0, 0.0);
    }
    let traj = integrate_ode(rhs, &[1.0], &grid, tol)?;
    let skip = usize::from(prepend);
    Ok(traj.states[skip..].iter().map(|s| lm.n_initial * s[0]).collect())
}

/// What the measured series represents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LifetimeInput {
    /// C̄_N, proportional to N̄.
    Cooperativity,
    /// On-resonance transmission, converted through the resonator model.
    Transmission(ResonatorParams),
}

/// Parameters held fixed during a lifetime fit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedLossParams {
    pub tau: Option<f64>,
    /// Fixed density, m⁻³; when absent n₀ is fitted.
    pub n0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeFit {
    pub family: ModelFamily,
    pub model: LossModel,
    pub fit: FitResult,
}

/// Converts a transmission series to C̄_N with first-order error propagation.
pub fn transmission_series_to_cn(data: &TimeSeries, rp: &ResonatorParams) -> Result<TimeSeries, KineticsError> {
    let mut values = Vec::with_capacity(data.len());
    let mut sigmas = Vec::with_capacity(data.len());
    for (&t, &s) in data.values.iter().zip(&data.sigmas) {
        let c = transmission_to_cn(t, rp)?;
        let h = 1e-6 * s.max(1e-9);
        let lo = transmission_to_cn((t - h).max(0.0), rp).unwrap_or(c);
        let hi = transmission_to_cn(t + h, rp).unwrap_or(c);
        let slope = (hi - lo) / (2.0 * h);
        values.push(c);
        sigmas.push((slope.abs() * s).max(1e-12));
    }
    TimeSeries::new(data.times.clone(), values, sigmas)
}

/// Fits a loss-model family to a series proportional to N̄.
///
/// Free parameters are the initial amplitude, τ (unless fixed), the
/// multi-body coefficient and n₀ (unless fixed). With n₀ free the
/// coefficient and density enter only as L n₀ᵏ, which the fit reports as
/// [`KineticsError::Underdetermined`].
pub fn fit_lifetime(
    data: &TimeSeries,
    family: ModelFamily,
    input: LifetimeInput,
    fixed: FixedLossParams,
) -> Result<LifetimeFit, KineticsError> {
    data.validate()?;
    if data.len() < 5 {
        return Err(KineticsError::Data(format!("lifetime fit needs at least 5 points, got {}", data.len())));
    }
    let series = match input {
        LifetimeInput::Cooperativity => data.clone(),
        LifetimeInput::Transmission(rp) => transmission_series_to_cn(data, &rp)?,
    };
    let (t, y, s) = (&series.times, &series.values, &series.sigmas);
    let amp0 = y[0].abs().max(f64::MIN_POSITIVE);
    let span = t[t.len() - 1] - t[0];
    let tau0 = fixed.tau.unwrap_or_else(|| {
        let last = y[y.len() - 1];
        if last > 0.0 && y[0] > last {
            span / (y[0] / last).ln()
        } else {
            span
        }
    });
    let n0 = fixed.n0.unwrap_or(NOMINAL_DENSITY);
    let order = match family {
        ModelFamily::One => 0,
        ModelFamily::OneTwo => 1,
        ModelFamily::OneThree => 2,
    };
    // the multi-body term is fitted as the initial rate b = L n₀ᵏ in 1/s
    let b0 = 0.5 / tau0;
    let mut params = vec![
        Param::new("amplitude", amp0).bounded(0.0, f64::INFINITY),
        Param::new("tau", tau0).bounded(1e-6 * tau0, 1e6 * tau0).fixed_if(fixed.tau.is_some()),
    ];
    if order > 0 {
        params.push(Param::new("rate", b0).bounded(0.0, f64::INFINITY).with_scale(1.0 / tau0));
        params.push(Param::new("n0_scale", 1.0).bounded(1e-6, 1e6).fixed_if(fixed.n0.is_some()));
    }
    let model = |p: &[f64], x: &[f64]| {
        let (b2, b3) = match order {
            0 => (0.0, 0.0),
            1 => (p[2], 0.0),
            _ => (0.0, p[2]),
        };
        // n₀ rescaling changes the multi-body rate as (n₀ scale)ᵏ
        let scale = if order > 0 { p[3].powi(order) } else { 1.0 };
        x.iter().map(|&ti| p[0] * relative_population(ti, p[1], b2 * scale, b3 * scale)).collect::<Vec<f64>>()
    };
    let fit = match fit_nonlinear(&model, FitData::new(t, y, s), &params, &FitOptions::default()) {
        Err(NumericsError::DegenerateFit(_)) => return Err(KineticsError::Underdetermined(family.name().into())),
        other => other?,
    };
    let tau = fit.value("tau");
    let (mut l2, mut l3, mut n0_fit) = (0.0, 0.0, n0);
    if order > 0 {
        n0_fit = n0 * fit.value("n0_scale");
        let rate = fit.value("rate") * fit.value("n0_scale").powi(order);
        if order == 1 {
            l2 = rate / n0_fit;
        } else {
            l3 = rate / (n0_fit * n0_fit);
        }
    }
    let model = LossModel { tau, l2, l3, n0: n0_fit, n_initial: fit.value("amplitude") };
    Ok(LifetimeFit { family, model, fit })
}

impl LifetimeFit {
    /// Relative 1σ error of the fitted multi-body coefficient.
    pub fn coefficient_rel_error(&self) -> f64 {
        match self.fit.names.iter().position(|n| n == "rate") {
            Some(i) if self.fit.values[i] > 0.0 => self.fit.errors[i] / self.fit.values[i],
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialLifetime {
    /// 1/e time, s; infinite when the data show no decay.
    pub tau: f64,
    pub tau_error: f64,
    pub infinite: bool,
    pub fit: Option<FitResult>,
}

/// Single-exponential 1/e lifetime, A e^{−t/τ}.
///
/// Two points determine τ exactly; larger series are fitted. A decay rate
/// pinned at zero is reported as an infinite lifetime.
pub fn continuous_cooling_lifetime(data: &TimeSeries) -> Result<ExponentialLifetime, KineticsError> {
    data.validate()?;
    let (t, y) = (&data.times, &data.values);
    if data.len() == 2 {
        if !(y[0] > 0.0 && y[1] > 0.0) {
            return Err(KineticsError::Data("two-point lifetime needs positive values".into()));
        }
        let r = (y[0] / y[1]).ln();
        let infinite = r <= 0.0;
        let tau = if infinite { f64::INFINITY } else { (t[1] - t[0]) / r };
        return Ok(ExponentialLifetime { tau, tau_error: 0.0, infinite, fit: None });
    }
    if data.len() < 3 {
        return Err(KineticsError::Data("lifetime needs at least 2 points".into()));
    }
    let span = t[t.len() - 1] - t[0];
    let params = [
        Param::new("amplitude", y[0].abs().max(f64::MIN_POSITIVE)).bounded(0.0, f64::INFINITY),
        Param::new("rate", 1.0 / span).bounded(0.0, f64::INFINITY).with_scale(1.0 / span),
    ];
    let model = |p: &[f64], x: &[f64]| x.iter().map(|&ti| p[0] * (-p[1] * ti).exp()).collect::<Vec<f64>>();
    let fit = fit_nonlinear(&model, FitData::new(t, y, &data.sigmas), &params, &FitOptions::default())?;
    let rate = fit.value("rate");
    let infinite = rate <= 1e-9 / span;
    let (tau, tau_error) =
        if infinite { (f64::INFINITY, f64::INFINITY) } else { (1.0 / rate, fit.error("rate") / (rate * rate)) };
    Ok(ExponentialLifetime { tau, tau_error, infinite, fit: Some(fit) })
}

/// Protocol for the apparent single-exponential lifetime of a loss curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ApparentLifetimeProtocol {
    /// Last sample time, s.
    pub t_max: f64,
    pub points: usize,
    /// σ as a fraction of each sample.
    pub relative_sigma: f64,
}

impl Default for ApparentLifetimeProtocol {
    fn default() -> Self {
        Self { t_max: 0.300, points: 21, relative_sigma: 0.05 }
    }
}

/// τ′ from fitting A e^{−t/τ′} to the model curve sampled per `protocol`.
pub fn apparent_lifetime(lm: &LossModel, protocol: &ApparentLifetimeProtocol) -> Result<f64, KineticsError> {
    if protocol.points < 3 || !(protocol.t_max > 0.0) || !(protocol.relative_sigma > 0.0) {
        return Err(KineticsError::Data(format!("invalid apparent-lifetime protocol {protocol:?}")));
    }
    let t: Vec<f64> = (0..protocol.points).map(|i| protocol.t_max * i as f64 / (protocol.points - 1) as f64).collect();
    let y = evolve_atom_number(lm, &t)?;
    let s = y.iter().map(|v| protocol.relative_sigma * v).collect();
    let fit = continuous_cooling_lifetime(&TimeSeries::new(t, y, s)?)?;
    Ok(fit.tau)
}
