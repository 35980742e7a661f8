//! Special functions.

/// Error function, absolute error below 1e-15 over the real line.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Natural log of |Γ(x)|.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}
