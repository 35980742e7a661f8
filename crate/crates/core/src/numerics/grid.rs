use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Strictly increasing sample positions (meters).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    points: Vec<f64>,
    uniform: bool,
}

impl Grid1D {
    /// Uniform grid with `n` points spanning `[lo, hi]` inclusive.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self, NumericsError> {
        if n < 3 {
            return Err(NumericsError::InvalidGrid(format!("need at least 3 points, got {n}")));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(NumericsError::InvalidGrid(format!("bad interval [{lo}, {hi}]")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let points = (0..n).map(|i| lo + step * i as f64).collect();
        Ok(Self { points, uniform: true })
    }

    /// Uniform grid with spacing as close as possible to (and not above) `step`.
    pub fn with_spacing(lo: f64, hi: f64, step: f64) -> Result<Self, NumericsError> {
        if !(step > 0.0) {
            return Err(NumericsError::InvalidGrid(format!("spacing must be positive, got {step}")));
        }
        let n = ((hi - lo) / step).ceil() as usize + 1;
        Self::uniform(lo, hi, n.max(3))
    }

    /// Arbitrary grid. The uniform flag is set when all spacings agree to 1e-12 relative.
    pub fn from_points(points: Vec<f64>) -> Result<Self, NumericsError> {
        if points.len() < 3 {
            return Err(NumericsError::InvalidGrid(format!(
                "need at least 3 points, got {}",
                points.len()
            )));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(NumericsError::InvalidGrid("points must be strictly increasing".into()));
        }
        let first = points[1] - points[0];
        let uniform = points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - first).abs() <= 1e-12 * first.abs().max(f64::MIN_POSITIVE));
        Ok(Self { points, uniform })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn lo(&self) -> f64 {
        self.points[0]
    }

    pub fn hi(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Mean spacing; exact for uniform grids.
    pub fn spacing(&self) -> f64 {
        (self.hi() - self.lo()) / (self.len() - 1) as f64
    }

    /// Trapezoid-free grid sum `Σ f_i g_i h`, the inner product used for
    /// wavefunctions that vanish at both ends.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        let h = self.spacing();
        f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() * h
    }
}
