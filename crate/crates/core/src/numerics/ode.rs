//! Adaptive Dormand–Prince 5(4) integration.

use serde::{Deserialize, Serialize};

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the derivative scale when `None`.
    pub first_step: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol * 1e-6, first_step: None, max_steps: 1_000_000 }
    }
}

/// States sampled at the requested times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

// Dormand–Prince tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates `dy/dt = rhs(t, y)` from `t_eval[0]` and reports the state at every `t_eval`.
pub fn integrate_ode<F>(rhs: F, y0: &[f64], t_eval: &[f64], tol: f64) -> Result<Trajectory, NumericsError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if !(tol > 0.0 && tol <= 1e-2) {
        return Err(NumericsError::InvalidInput(format!("tolerance {tol} outside (0, 1e-2]")));
    }
    integrate_ode_with(rhs, y0, t_eval, &OdeOptions::with_tol(tol))
}

pub fn integrate_ode_with<F>(
    rhs: F,
    y0: &[f64],
    t_eval: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory, NumericsError>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    if t_eval.is_empty() {
        return Err(NumericsError::InvalidInput("no output times".into()));
    }
    if t_eval.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(NumericsError::InvalidInput("output times must increase".into()));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("initial state".into()));
    }
    let n = y0.len();
    let mut t = t_eval[0];
    let mut y = y0.to_vec();
    let mut k = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y5 = vec![0.0; n];
    let mut out = Trajectory { times: vec![t], states: vec![y.clone()], steps_accepted: 0, steps_rejected: 0 };

    rhs(t, &y, &mut k[0]);
    let span = t_eval[t_eval.len() - 1] - t;
    let mut h = opts.first_step.unwrap_or_else(|| {
        let d0 = y.iter().map(|v| v.abs()).fold(0.0, f64::max).max(opts.atol);
        let d1 = k[0].iter().map(|v| v.abs()).fold(0.0, f64::max);
        if d1 > 0.0 { (0.01 * d0 / d1).min(span) } else { span * 1e-3 }
    });
    if !(h > 0.0) {
        h = span.max(1e-12) * 1e-3;
    }

    for &target in &t_eval[1..] {
        while t < target {
            if out.steps_accepted + out.steps_rejected >= opts.max_steps {
                return Err(NumericsError::Stiffness { t });
            }
            let last = t + h >= target;
            let step = if last { target - t } else { h };
            if step <= 1e-14 * t.abs().max(span) {
                return Err(NumericsError::Stiffness { t });
            }
            for s in 1..7 {
                for i in 0..n {
                    let acc: f64 = (0..s).map(|j| A[s][j] * k[j][i]).sum();
                    stage[i] = y[i] + step * acc;
                }
                rhs(t + C[s] * step, &stage, &mut k[s]);
            }
            let mut err = 0.0;
            for i in 0..n {
                y5[i] = y[i] + step * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
                let e = step * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>();
                let sc = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                out.steps_rejected += 1;
                h = step * 0.2;
                continue;
            }
            if err <= 1.0 {
                t = if last { target } else { t + step };
                y.copy_from_slice(&y5);
                // first-same-as-last: stage 7 was evaluated at the new point
                let k7 = k[6].clone();
                k[0].copy_from_slice(&k7);
                out.steps_accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a truncated final step says nothing about the natural step size
                h = if last { h.max(step * fac) } else { step * fac };
            } else {
                out.steps_rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        }
        out.times.push(target);
        out.states.push(y.clone());
    }
    Ok(out)
}
