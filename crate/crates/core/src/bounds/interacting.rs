//! Bounds for `H_{m,Ω} + V` with a potential whose negative part is
//! controlled by the constant `α < 1`.

use super::require_d2;
use crate::error::{Error, Result};
use crate::operator::PotentialSpec;
use crate::special::gamma;
use crate::stats::{EigenvalueList, Evaluation};
use std::f64::consts::PI;

fn check_exponent(s: f64, d: usize) -> Result<()> {
    require_d2(d)?;
    if !s.is_finite() {
        return Err(Error::Unsupported("s = ∞ is not supported".into()));
    }
    if s <= d as f64 {
        return Err(Error::Unsupported(format!("exponent s = {s} must exceed d = {d}")));
    }
    Ok(())
}

/// `α` for a given `‖V_−‖_s`:
///
/// ```text
/// α = ‖V_−‖_s Γ(d−1) (s−1)^{(s−1)/s}
///     / [√π 2^{(d−1)²/d} Γ(d/2)^{(1−2d)/d} (d|Ω|)^{(d−s)/(sd)} (s−d)^{(s−1)/s}]
/// ```
///
/// with `(d−2)!` written as `Γ(d−1)`.
pub fn alpha_from_norm(norm: f64, s: f64, d: usize, volume: f64) -> Result<f64> {
    check_exponent(s, d)?;
    if !(volume > 0.0 && norm >= 0.0) {
        return Err(Error::OutOfRange("alpha needs positive volume and a nonnegative norm".into()));
    }
    let df = d as f64;
    let e = (s - 1.0) / s;
    let denom = PI.sqrt()
        * 2f64.powf((df - 1.0).powi(2) / df)
        * gamma(df / 2.0).powf((1.0 - 2.0 * df) / df)
        * (df * volume).powf((df - s) / (s * df))
        * (s - df).powf(e);
    Ok(norm * gamma(df - 1.0) * (s - 1.0).powf(e) / denom)
}

/// The same constant assembled from the estimate chain it comes from: the
/// kernel bound `c_d/(d−1) |x|^{−(d−1)}` times the `L^{s/(s−1)}` norm of
/// `|x|^{−(d−1)}` on the ball of volume `|Ω|`.
///
/// Agrees with [`alpha_from_norm`] for `d = 2`; for `d ≥ 3` the two differ
/// by `Γ(d/2)^{2(1−2d)/d}`, see the crate README.
pub fn alpha_from_kernel_chain(norm: f64, s: f64, d: usize, volume: f64) -> Result<f64> {
    check_exponent(s, d)?;
    let df = d as f64;
    let c_d = crate::operator::semiclassical_constant(d);
    let omega = 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0);
    let radius = (df * volume / omega).powf(1.0 / df);
    let q = s / (s - 1.0);
    // ∫_{B_R} |x|^{−(d−1)q} dx = ω R^{(s−d)/(s−1)} (s−1)/(s−d)
    let lq = (omega * radius.powf((s - df) / (s - 1.0)) * (s - 1.0) / (s - df)).powf(1.0 / q);
    Ok(norm * c_d / (df - 1.0) * lq)
}

/// `α` and admissibility (`α < 1`) for a sampled potential.
pub fn alpha_constant(potential: &PotentialSpec, d: usize, volume: f64) -> Result<(f64, bool)> {
    let a = alpha_from_norm(potential.negative_norm, potential.exponent, d, volume)?;
    Ok((a, a < 1.0))
}

fn check_alpha(alpha: f64, d: usize) -> Result<()> {
    require_d2(d)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Precondition(format!("α = {alpha} is not admissible (needs 0 ≤ α < 1)")));
    }
    Ok(())
}

/// `(d+1) − α(d−1)`.
pub fn exponent(alpha: f64, d: usize) -> f64 {
    (d as f64 + 1.0) - alpha * (d as f64 - 1.0)
}

/// `1 + 2/((d−1)(1−α))`.
pub fn ratio_constant(alpha: f64, d: usize) -> Result<f64> {
    check_alpha(alpha, d)?;
    Ok(1.0 + 2.0 / ((d as f64 - 1.0) * (1.0 - alpha)))
}

/// Larger root of
/// `(d−1)(1−α) β̄_k^{−1} z² − 2[d−α(d−1)] z + [d+1−α(d−1)] β̄_k`.
pub fn root_bound(list: &EigenvalueList, k: usize, d: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha, d)?;
    let _ = list.moment_mean(k, 1.0)?;
    let a = (d as f64 - 1.0) * (1.0 - alpha);
    let b = a + 1.0;
    let p = list.mean(k) * list.mean_inverse(k);
    let disc = 1.0 - (b * b - 1.0) * (p - 1.0);
    if disc < -1e-12 {
        return Err(Error::Precondition(format!("negative discriminant {disc}: no z satisfies the quadratic")));
    }
    Ok((b + disc.max(0.0).sqrt()) / (a * list.mean_inverse(k)))
}

/// The quadratic whose larger root is [`root_bound`].
pub fn quadratic(list: &EigenvalueList, k: usize, d: usize, alpha: f64, z: f64) -> Result<f64> {
    check_alpha(alpha, d)?;
    let _ = list.moment_mean(k, 1.0)?;
    let a = (d as f64 - 1.0) * (1.0 - alpha);
    Ok(a * list.mean_inverse(k) * z * z - 2.0 * (a + 1.0) * z + (a + 2.0) * list.mean(k))
}

/// `z ≥ (p/((d−1)(1−α))) β̄_j` with `p = (d+1) − α(d−1)`.
pub fn riesz_threshold(list: &EigenvalueList, j: usize, d: usize, alpha: f64) -> f64 {
    exponent(alpha, d) / ((d as f64 - 1.0) * (1.0 - alpha)) * list.mean(j)
}

/// `2j[(d−1)(1−α)]^{p−1} z^p / (p^p β̄_j^{p−1})`, `p = (d+1) − α(d−1)`.
pub fn riesz_lower_bound(list: &EigenvalueList, j: usize, d: usize, alpha: f64, z: f64) -> Result<Evaluation> {
    check_alpha(alpha, d)?;
    let _ = list.moment_mean(j, 1.0)?;
    let t = riesz_threshold(list, j, d, alpha);
    if z < t * (1.0 - 1e-12) {
        return Err(Error::OutOfRange(format!("z = {z} below the validity threshold {t}")));
    }
    let p = exponent(alpha, d);
    let a = (d as f64 - 1.0) * (1.0 - alpha);
    let value = 2.0 * j as f64 * a.powf(p - 1.0) * z.powf(p) / (p.powf(p) * list.mean(j).powf(p - 1.0));
    Ok(Evaluation { value, truncated: z > list.ceiling() })
}

/// `((p−1)/((d−1)(1−α) 2^{1/(p−1)})) (k/j)^{1/(p−1)}` for `k > 2j`.
pub fn mean_ratio_bound(j: usize, k: usize, d: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha, d)?;
    if j == 0 || k <= 2 * j {
        return Err(Error::OutOfRange(format!("mean ratio bound needs k > 2j (j = {j}, k = {k})")));
    }
    let q = exponent(alpha, d) - 1.0;
    let a = (d as f64 - 1.0) * (1.0 - alpha);
    Ok(q / (a * 2f64.powf(1.0 / q)) * (k as f64 / j as f64).powf(1.0 / q))
}
