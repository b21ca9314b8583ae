//! Free transition density of the semigroup `exp(−t√(−Δ))` on `R^d`.

use crate::error::{Error, Result};
use crate::special::gamma;
use std::f64::consts::PI;

/// `c_d = d! / ((4π)^{d/2} Γ(1 + d/2))`.
pub fn semiclassical_constant(d: usize) -> f64 {
    let df = d as f64;
    gamma(df + 1.0) / ((4.0 * PI).powf(df / 2.0) * gamma(1.0 + df / 2.0))
}

/// `p_0(x, t) = c_d t / (t² + |x|²)^{(d+1)/2}`; the dimension is `x.len()`.
pub fn free_density_p0(x: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("time {t} must be positive")));
    }
    let d = x.len();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    Ok(semiclassical_constant(d) * t / (t * t + r2).powf((d as f64 + 1.0) / 2.0))
}
