//! Adaptive Gauss–Kronrod quadrature in one and several dimensions.

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Axis-aligned box `[lo_i, hi_i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        Self { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes (indices 1, 3, 5, 7)
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_INTERVALS: usize = 4000;

#[derive(Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment, NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    if !fc.is_finite() {
        return Err(NumericsError::NonFinite(format!("integrand at {c}")));
    }
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx)?;
        let f2 = f(c + dx)?;
        if !f1.is_finite() || !f2.is_finite() {
            return Err(NumericsError::NonFinite(format!("integrand near {c} ± {dx}")));
        }
        kronrod += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Segment { a, b, value: kronrod * h, error: ((kronrod - gauss) * h).abs() })
}

/// Globally adaptive G7K15 integration of a fallible integrand.
///
/// Converges when the summed error estimate is below `tol·|I|` (or below a
/// few ulps of the integral of `|f|`, for integrals that cancel to zero).
pub fn quad_1d_try<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<(f64, f64), NumericsError>
where
    F: FnMut(f64) -> Result<f64, NumericsError>,
{
    if !(b > a) {
        if a == b {
            return Ok((0.0, 0.0));
        }
        return Err(NumericsError::InvalidInput(format!("interval [{a}, {b}]")));
    }
    let mut segments = vec![gk15(&mut f, a, b)?];
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let floor = 50.0 * f64::EPSILON * segments.iter().map(|s| s.value.abs()).sum::<f64>();
        if error <= (tol * value.abs()).max(floor) {
            return Ok((value, error));
        }
        if segments.len() >= MAX_INTERVALS {
            return Err(NumericsError::QuadratureTolerance { tol, estimate: error / value.abs() });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(NumericsError::QuadratureTolerance { tol, estimate: error / value.abs() });
        }
        segments.push(gk15(&mut f, s.a, mid)?);
        segments.push(gk15(&mut f, mid, s.b)?);
    }
}

/// `∫_a^b f(x) dx` to relative tolerance `tol`.
pub fn quad_1d<F>(mut f: F, a: f64, b: f64, tol: f64) -> Result<f64, NumericsError>
where
    F: FnMut(f64) -> f64,
{
    quad_1d_try(|x| Ok(f(x)), a, b, tol).map(|(v, _)| v)
}

/// Iterated adaptive quadrature over an axis-aligned box.
///
/// Each inner integral is solved to `tol/4`, which keeps the propagated
/// error of the outer integral within `tol` for integrands of one sign.
pub fn quad_nd<F>(f: F, domain: &Domain, tol: f64) -> Result<f64, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    let d = domain.dim();
    if d == 0 || domain.hi.len() != d {
        return Err(NumericsError::InvalidInput("domain dimension mismatch".into()));
    }
    if !(tol > 0.0) {
        return Err(NumericsError::InvalidInput(format!("tolerance {tol}")));
    }
    let mut point = vec![0.0; d];
    nested(&f, domain, tol, 0, &mut point)
}

fn nested<F>(f: &F, domain: &Domain, tol: f64, axis: usize, point: &mut Vec<f64>) -> Result<f64, NumericsError>
where
    F: Fn(&[f64]) -> f64,
{
    let last = axis + 1 == domain.dim();
    let inner_tol = if last { tol } else { tol * 0.25 };
    let (lo, hi) = (domain.lo[axis], domain.hi[axis]);
    let mut cell = std::mem::take(point);
    let result = quad_1d_try(
        |x| {
            cell[axis] = x;
            if last {
                Ok(f(&cell))
            } else {
                nested(f, domain, inner_tol, axis + 1, &mut cell)
            }
        },
        lo,
        hi,
        tol,
    );
    *point = cell;
    result.map(|(v, _)| v)
}
