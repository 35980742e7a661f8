//! Bounded Levenberg–Marquardt least squares with a central-difference Jacobian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::NumericsError;

/// A named fit parameter with optional box bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Param {
    pub name: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub fixed: bool,
    /// Typical magnitude; sets the finite-difference step and gradient units.
    pub scale: f64,
}

impl Param {
    pub fn new(name: &str, value: f64) -> Self {
        let scale = if value != 0.0 { value.abs() } else { 1.0 };
        Self {
            name: name.to_string(),
            value,
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
            fixed: false,
            scale,
        }
    }

    pub fn bounded(mut self, lower: f64, upper: f64) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn fixed(mut self) -> Self {
        self.fixed = true;
        self
    }

    pub fn fixed_if(mut self, fixed: bool) -> Self {
        self.fixed = fixed;
        self
    }
}

/// Observations `(x, y, σ_y)`.
#[derive(Debug, Clone, Copy)]
pub struct FitData<'a> {
    pub x: &'a [f64],
    pub y: &'a [f64],
    pub sigma: &'a [f64],
}

impl<'a> FitData<'a> {
    pub fn new(x: &'a [f64], y: &'a [f64], sigma: &'a [f64]) -> Self {
        Self { x, y, sigma }
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    pub rel_chi2_tol: f64,
    pub grad_tol: f64,
    pub initial_lambda: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { max_iter: 500, rel_chi2_tol: 1e-10, grad_tol: 1e-8, initial_lambda: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub names: Vec<String>,
    pub values: Vec<f64>,
    /// Square roots of the covariance diagonal; zero for fixed or bound-pinned parameters.
    pub errors: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub chi2: f64,
    pub dof: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Free parameters that finished on a bound.
    pub at_bound: Vec<bool>,
}

impl FitResult {
    fn index(&self, name: &str) -> usize {
        self.names
            .iter()
            .position(|n| n == name)
            .unwrap_or_else(|| panic!("no fit parameter named {name}"))
    }

    pub fn value(&self, name: &str) -> f64 {
        self.values[self.index(name)]
    }

    pub fn error(&self, name: &str) -> f64 {
        self.errors[self.index(name)]
    }

    pub fn reduced_chi2(&self) -> f64 {
        self.chi2 / self.dof as f64
    }
}

/// Model evaluated on all abscissae at once: `(params, x) -> predictions`.
pub trait FitProblem {
    fn predict(&self, params: &[f64], x: &[f64]) -> Vec<f64>;
}

impl<F> FitProblem for F
where
    F: Fn(&[f64], &[f64]) -> Vec<f64>,
{
    fn predict(&self, params: &[f64], x: &[f64]) -> Vec<f64> {
        self(params, x)
    }
}

struct Work<'a, M: FitProblem + ?Sized> {
    model: &'a M,
    data: FitData<'a>,
    params: &'a [Param],
    free: Vec<usize>,
}

impl<M: FitProblem + ?Sized> Work<'_, M> {
    fn residuals(&self, p: &[f64]) -> Option<Vec<f64>> {
        let m = self.model.predict(p, self.data.x);
        if m.len() != self.data.len() {
            return None;
        }
        let r: Vec<f64> = m
            .iter()
            .zip(self.data.y)
            .zip(self.data.sigma)
            .map(|((m, y), s)| (y - m) / s)
            .collect();
        r.iter().all(|v| v.is_finite()).then_some(r)
    }

    /// d(model/σ)/dp for the free parameters, column-major by free index.
    fn jacobian(&self, p: &[f64], r0: &[f64]) -> Result<DMatrix<f64>, NumericsError> {
        let n = self.data.len();
        let mut jac = DMatrix::zeros(n, self.free.len());
        let mut q = p.to_vec();
        for (col, &i) in self.free.iter().enumerate() {
            let par = &self.params[i];
            let h = 1e-6 * par.scale.abs().max(f64::MIN_POSITIVE);
            let (lo, hi) = (par.lower, par.upper);
            let up = p[i] + h <= hi;
            let down = p[i] - h >= lo;
            let eval = |q: &mut Vec<f64>, v: f64| {
                q[i] = v;
                let r = self.residuals(q);
                q[i] = p[i];
                r
            };
            let column: Vec<f64> = match (up, down) {
                (true, true) => {
                    let rp = eval(&mut q, p[i] + h);
                    let rm = eval(&mut q, p[i] - h);
                    match (rp, rm) {
                        (Some(rp), Some(rm)) => rp.iter().zip(&rm).map(|(a, b)| (b - a) / (2.0 * h)).collect(),
                        _ => return Err(NumericsError::NonFinite(format!("model near {}", par.name))),
                    }
                }
                (true, false) => match eval(&mut q, p[i] + h) {
                    Some(rp) => rp.iter().zip(r0).map(|(a, b)| (b - a) / h).collect(),
                    None => return Err(NumericsError::NonFinite(format!("model near {}", par.name))),
                },
                (false, true) => match eval(&mut q, p[i] - h) {
                    Some(rm) => r0.iter().zip(&rm).map(|(a, b)| (b - a) / h).collect(),
                    None => return Err(NumericsError::NonFinite(format!("model near {}", par.name))),
                },
                (false, false) => {
                    return Err(NumericsError::InvalidInput(format!(
                        "bounds of {} narrower than the difference step",
                        par.name
                    )))
                }
            };
            jac.set_column(col, &DVector::from_vec(column));
        }
        Ok(jac)
    }

    fn at_bound(&self, p: &[f64], i: usize, gradient_sign: f64) -> bool {
        let par = &self.params[i];
        // gradient_sign > 0 means χ² decreases when p_i increases
        (p[i] >= par.upper && gradient_sign > 0.0) || (p[i] <= par.lower && gradient_sign < 0.0)
    }
}

fn chi2(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

fn validate(data: &FitData, params: &[Param]) -> Result<usize, NumericsError> {
    if data.x.len() != data.y.len() || data.y.len() != data.sigma.len() {
        return Err(NumericsError::InvalidInput("x, y and sigma lengths differ".into()));
    }
    if data.sigma.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(NumericsError::InvalidInput("all uncertainties must be positive".into()));
    }
    if data.y.iter().chain(data.x).any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite("fit data".into()));
    }
    for p in params {
        if !(p.lower <= p.value && p.value <= p.upper) || !p.value.is_finite() {
            return Err(NumericsError::InvalidInput(format!(
                "initial {} = {} outside [{}, {}]",
                p.name, p.value, p.lower, p.upper
            )));
        }
    }
    let n_free = params.iter().filter(|p| !p.fixed).count();
    if n_free == 0 {
        return Err(NumericsError::InvalidInput("no free parameters".into()));
    }
    if data.len() < n_free + 1 {
        return Err(NumericsError::InvalidInput(format!(
            "{} points cannot constrain {} free parameters with dof >= 1",
            data.len(),
            n_free
        )));
    }
    Ok(data.len() - n_free)
}

/// Minimizes `Σ((y − model(p, x))/σ)²` over the free parameters.
///
/// Iteration stops when an accepted step changes χ² by less than
/// `rel_chi2_tol` relative, when the projected gradient (in units of each
/// parameter's scale) falls below `grad_tol`, or when damping can no longer
/// find a descent step. Hitting `max_iter` returns the best point with
/// `converged = false`. The covariance is `(JᵀJ)⁻¹` on the free parameters
/// that are not pinned at a bound.
pub fn fit_nonlinear<M>(
    model: &M,
    data: FitData,
    params: &[Param],
    opts: &FitOptions,
) -> Result<FitResult, NumericsError>
where
    M: FitProblem + ?Sized,
{
    let dof = validate(&data, params)?;
    let free: Vec<usize> = (0..params.len()).filter(|&i| !params[i].fixed).collect();
    let work = Work { model, data, params, free };
    let nf = work.free.len();

    let mut p: Vec<f64> = params.iter().map(|q| q.value).collect();
    let mut r = work
        .residuals(&p)
        .ok_or_else(|| NumericsError::NonFinite("model at initial parameters".into()))?;
    let mut c2 = chi2(&r);
    let mut lambda = opts.initial_lambda;
    let mut converged = false;
    let mut iterations = 0;
    let scales: Vec<f64> = work.free.iter().map(|&i| params[i].scale.abs().max(f64::MIN_POSITIVE)).collect();

    'outer: while iterations < opts.max_iter {
        iterations += 1;
        let jac = work.jacobian(&p, &r)?;
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * DVector::from_column_slice(&r);

        let grad_norm = work
            .free
            .iter()
            .enumerate()
            .filter(|&(k, &i)| !work.at_bound(&p, i, g[k]))
            .map(|(k, _)| (g[k] * scales[k]).powi(2))
            .sum::<f64>()
            .sqrt();
        if grad_norm < opts.grad_tol || c2 == 0.0 {
            converged = true;
            break;
        }

        let diag_max = (0..nf).map(|k| jtj[(k, k)]).fold(0.0, f64::max);
        loop {
            let mut a = jtj.clone();
            for k in 0..nf {
                let d = jtj[(k, k)].max(1e-12 * diag_max).max(f64::MIN_POSITIVE);
                a[(k, k)] += lambda * d;
            }
            let step = match a.clone().cholesky() {
                Some(ch) => ch.solve(&g),
                None => match a.lu().solve(&g) {
                    Some(s) => s,
                    None => {
                        lambda *= 10.0;
                        if lambda > 1e16 {
                            converged = true;
                            break 'outer;
                        }
                        continue;
                    }
                },
            };
            let mut trial = p.clone();
            for (k, &i) in work.free.iter().enumerate() {
                trial[i] = (p[i] + step[k]).clamp(params[i].lower, params[i].upper);
            }
            match work.residuals(&trial) {
                Some(rt) if chi2(&rt) <= c2 => {
                    let c2t = chi2(&rt);
                    let rel = (c2 - c2t) / c2.max(f64::MIN_POSITIVE);
                    let moved = trial != p;
                    p = trial;
                    r = rt;
                    c2 = c2t;
                    lambda = (lambda / 10.0).max(1e-15);
                    if rel < opts.rel_chi2_tol || !moved {
                        converged = true;
                        break 'outer;
                    }
                    break;
                }
                _ => {
                    lambda *= 10.0;
                    if lambda > 1e16 {
                        converged = true;
                        break 'outer;
                    }
                }
            }
        }
    }

    // covariance at the final point
    let jac = work.jacobian(&p, &r)?;
    let g = jac.transpose() * DVector::from_column_slice(&r);
    let mut at_bound = vec![false; params.len()];
    let mut active = Vec::new();
    for (k, &i) in work.free.iter().enumerate() {
        let pinned = p[i] <= params[i].lower || p[i] >= params[i].upper;
        if pinned && (work.at_bound(&p, i, g[k]) || g[k] == 0.0) {
            at_bound[i] = true;
        } else {
            active.push(k);
        }
    }
    let mut covariance = vec![vec![0.0; params.len()]; params.len()];
    if !active.is_empty() {
        let sub = jac.select_columns(&active);
        let jtj = sub.transpose() * &sub;
        let d: Vec<f64> = (0..active.len()).map(|k| jtj[(k, k)].sqrt()).collect();
        if let Some(k) = d.iter().position(|v| !(*v > 0.0)) {
            let name = &params[work.free[active[k]]].name;
            return Err(NumericsError::DegenerateFit(format!("data do not constrain {name}")));
        }
        let scaled = DMatrix::from_fn(active.len(), active.len(), |a, b| jtj[(a, b)] / (d[a] * d[b]));
        let eig = scaled.clone().symmetric_eigen();
        let min_ev = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_ev > 1e-13) {
            let names: Vec<&str> = active.iter().map(|&k| params[work.free[k]].name.as_str()).collect();
            return Err(NumericsError::DegenerateFit(format!(
                "singular Jacobian among {}",
                names.join(", ")
            )));
        }
        let inv = scaled
            .try_inverse()
            .ok_or_else(|| NumericsError::DegenerateFit("normal matrix not invertible".into()))?;
        for (a, &ka) in active.iter().enumerate() {
            for (b, &kb) in active.iter().enumerate() {
                let (i, j) = (work.free[ka], work.free[kb]);
                covariance[i][j] = inv[(a, b)] / (d[a] * d[b]);
            }
        }
        for i in 0..params.len() {
            for j in 0..i {
                let s = 0.5 * (covariance[i][j] + covariance[j][i]);
                covariance[i][j] = s;
                covariance[j][i] = s;
            }
        }
    }
    let errors = (0..params.len()).map(|i| covariance[i][i].max(0.0).sqrt()).collect();

    Ok(FitResult {
        names: params.iter().map(|q| q.name.clone()).collect(),
        values: p,
        errors,
        covariance,
        chi2: c2,
        dof,
        converged,
        iterations,
        at_bound,
    })
}

/// Convenience wrapper for models defined point by point.
pub fn fit_curve<F>(model: F, data: FitData, params: &[Param], opts: &FitOptions) -> Result<FitResult, NumericsError>
where
    F: Fn(f64, &[f64]) -> f64,
{
    let vectorized = |p: &[f64], x: &[f64]| x.iter().map(|&xi| model(xi, p)).collect::<Vec<f64>>();
    fit_nonlinear(&vectorized, data, params, opts)
}
