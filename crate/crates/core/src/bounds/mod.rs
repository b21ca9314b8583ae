//! Closed-form constants and eigenvalue inequalities, and checkers that
//! compare them with computed spectra.

pub mod checks;
pub mod interacting;
pub mod trace;

pub use checks::CheckContext;
pub use interacting::{alpha_constant, alpha_from_norm};
pub use trace::{trace_inequality_check, uvsr1_check, UvsR1};

use crate::error::{Error, Result};
use crate::special::gamma;
use crate::stats::{EigenvalueList, Evaluation};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

/// Default relative slack for inequalities between computed eigenvalues.
pub const DISCRETIZATION_SLACK: f64 = 0.02;
/// Scaled tolerance for identities that hold exactly for finite matrices.
pub const EXACT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackRegime {
    /// Continuum inequality; slack absorbs discretization error.
    Discretization,
    /// Algebraic identity; slack absorbs round-off only.
    Exact,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ReportContext {
    pub d: usize,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
}

/// One checked inequality `lhs ≤ rhs`; lower bounds are stored with the
/// sides swapped so that `margin = rhs − lhs` always.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Absolute slack actually applied.
    pub slack: f64,
    pub regime: SlackRegime,
    pub pass: bool,
    pub truncated: bool,
    pub context: ReportContext,
}

impl BoundReport {
    pub fn new(
        name: &str,
        anchor: &str,
        lhs: f64,
        rhs: f64,
        slack: f64,
        regime: SlackRegime,
        context: ReportContext,
    ) -> Self {
        let margin = rhs - lhs;
        BoundReport {
            name: name.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            margin,
            slack,
            regime,
            pass: margin >= -slack,
            truncated: false,
            context,
        }
    }

    pub fn truncated(mut self, flag: bool) -> Self {
        self.truncated = flag;
        self
    }
}

pub fn write_reports_csv(reports: &[BoundReport], out: &mut impl Write) -> Result<()> {
    writeln!(out, "name,anchor,lhs,rhs,margin,slack,regime,pass,truncated,d,m,k,j,z,domain")?;
    let o = |v: Option<String>| v.unwrap_or_default();
    for r in reports {
        let c = &r.context;
        writeln!(
            out,
            "{},\"{}\",{:.17e},{:.17e},{:.17e},{:.6e},{},{},{},{},{},{},{},{},{}",
            r.name,
            r.anchor,
            r.lhs,
            r.rhs,
            r.margin,
            r.slack,
            match r.regime {
                SlackRegime::Discretization => "discretization",
                SlackRegime::Exact => "exact",
            },
            r.pass,
            r.truncated,
            c.d,
            c.m,
            o(c.k.map(|v| v.to_string())),
            o(c.j.map(|v| v.to_string())),
            o(c.z.map(|v| format!("{v:.17e}"))),
            o(c.domain.clone()),
        )?;
    }
    Ok(())
}

/// Dimension-dependent constants.
#[derive(Debug, Clone, Serialize)]
pub struct Constants {
    pub d: usize,
    /// `c_d = d!/((4π)^{d/2} Γ(1+d/2))`.
    pub c_d: f64,
    /// `ω_{d−1} = |S^{d−1}| = 2π^{d/2}/Γ(d/2)`.
    pub omega: f64,
    /// `N(β) ~ C |Ω| β^d`.
    pub weyl_counting: f64,
    /// `β_k ~ C (k/|Ω|)^{1/d}`.
    pub weyl_beta: f64,
    /// Li-Yau type coefficient, `d/(d+1)` times `weyl_beta`.
    pub li_yau: f64,
    /// Earlier, weaker coefficient with `(d−1)2^{1/d}` in place of `d`.
    pub li_yau_old: f64,
    /// `(d+1)/(d−1)`; absent for `d = 1`.
    pub ratio: Option<f64>,
    /// `d/(2^{1/d}(d−1))`; absent for `d = 1`.
    pub mean_ratio: Option<f64>,
    /// `U(z) ~ C |Ω| z^{d+1}`; absent for `d = 1`.
    pub weyl_u: Option<f64>,
}

impl Constants {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::OutOfRange("dimension must be at least 1".into()));
        }
        let df = d as f64;
        let g = gamma(1.0 + df / 2.0);
        let weyl_counting = 1.0 / ((4.0 * PI).powf(df / 2.0) * g);
        let weyl_beta = (4.0 * PI).sqrt() * g.powf(1.0 / df);
        let higher = (d >= 2).then_some(());
        Ok(Constants {
            d,
            c_d: crate::operator::semiclassical_constant(d),
            omega: 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0),
            weyl_counting,
            weyl_beta,
            li_yau: weyl_beta * df / (df + 1.0),
            li_yau_old: weyl_beta * (df - 1.0) * 2f64.powf(1.0 / df) / (df + 1.0),
            ratio: higher.map(|_| (df + 1.0) / (df - 1.0)),
            mean_ratio: higher.map(|_| df / (2f64.powf(1.0 / df) * (df - 1.0))),
            weyl_u: higher.map(|_| 2.0 * weyl_counting / (df * df - 1.0)),
        })
    }
}

fn require_d2(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Unsupported(format!("bound requires d ≥ 2, got d = {d}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRoot {
    /// Larger root of the quadratic certificate.
    pub root: f64,
    /// `(d+1)/((d−1) β̄_k^{−1})`.
    pub simple_harmonic: f64,
    /// `((d+1)/(d−1)) β̄_k`.
    pub simple_mean: f64,
}

/// Upper bound for `β_{k+1}` from the first `k` eigenvalues.
pub fn ratio_root_bound(list: &EigenvalueList, k: usize, d: usize) -> Result<RatioRoot> {
    require_d2(d)?;
    let _ = list.moment_mean(k, 1.0)?;
    let df = d as f64;
    let (mean, inv) = (list.mean(k), list.mean_inverse(k));
    let disc = df * df - (df * df - 1.0) * mean * inv;
    // β̄·β̄^{−1} ≥ 1 can fail only by round-off, and then by a few ulps
    if disc < -1e-12 * df * df {
        return Err(Error::Precondition(format!(
            "negative discriminant {disc}: no z satisfies the quadratic, so the list cannot be such a spectrum"
        )));
    }
    Ok(RatioRoot {
        root: (df + disc.max(0.0).sqrt()) / ((df - 1.0) * inv),
        simple_harmonic: (df + 1.0) / ((df - 1.0) * inv),
        simple_mean: (df + 1.0) / (df - 1.0) * mean,
    })
}

/// `(d−1) β̄_k^{−1} z² − 2dz + (d+1) β̄_k`; nonpositive at `z = β_{k+1}`.
pub fn quadratic_certificate(list: &EigenvalueList, k: usize, d: usize, z: f64) -> Result<f64> {
    require_d2(d)?;
    let _ = list.moment_mean(k, 1.0)?;
    let df = d as f64;
    Ok((df - 1.0) * list.mean_inverse(k) * z * z - 2.0 * df * z + (df + 1.0) * list.mean(k))
}

/// `(2/(d−1)) β_1*/Inr` and the weaker `(2/(d−1)) √λ_1*/Inr`.
pub fn gap_inradius_bound(d: usize, beta1_star: f64, sqrt_lambda1_star: f64, inradius: f64) -> Result<(f64, f64)> {
    require_d2(d)?;
    if !(inradius > 0.0) {
        return Err(Error::OutOfRange(format!("inradius {inradius} must be positive")));
    }
    let c = 2.0 / (d as f64 - 1.0) / inradius;
    Ok((c * beta1_star, c * sqrt_lambda1_star))
}

/// `z ≥ ((d+1)/(d−1)) β̄_j`, the validity threshold of the Riesz lower bound.
pub fn riesz_threshold(list: &EigenvalueList, j: usize, d: usize) -> f64 {
    let df = d as f64;
    (df + 1.0) / (df - 1.0) * list.mean(j)
}

/// `2j(d−1)^d z^{d+1} / ((d+1)^{d+1} β̄_j^d)`.
pub fn riesz_lower_bound(list: &EigenvalueList, j: usize, d: usize, z: f64) -> Result<Evaluation> {
    require_d2(d)?;
    let _ = list.moment_mean(j, 1.0)?;
    let threshold = riesz_threshold(list, j, d);
    if z < threshold * (1.0 - 1e-12) {
        return Err(Error::OutOfRange(format!("z = {z} below the validity threshold {threshold}")));
    }
    let df = d as f64;
    let value = 2.0 * j as f64 * (df - 1.0).powf(df) * z.powf(df + 1.0)
        / ((df + 1.0).powf(df + 1.0) * list.mean(j).powf(df));
    Ok(Evaluation { value, truncated: z > list.ceiling() })
}

/// `(d/(2^{1/d}(d−1))) (k/j)^{1/d}`, valid for `k > 2j`.
pub fn mean_ratio_bound(j: usize, k: usize, d: usize) -> Result<f64> {
    require_d2(d)?;
    if k <= 2 * j || j == 0 {
        return Err(Error::OutOfRange(format!("mean ratio bound needs k > 2j (j = {j}, k = {k})")));
    }
    let df = d as f64;
    Ok(df / (2f64.powf(1.0 / df) * (df - 1.0)) * (k as f64 / j as f64).powf(1.0 / df))
}

/// `|Ω| β^d / ((4π)^{d/2} Γ(1+d/2))`.
pub fn weyl_counting(beta: f64, d: usize, volume: f64) -> f64 {
    let df = d as f64;
    volume * beta.powf(df) / ((4.0 * PI).powf(df / 2.0) * gamma(1.0 + df / 2.0))
}

/// `√(4π) (Γ(1+d/2) k/|Ω|)^{1/d}`.
pub fn weyl_beta(k: f64, d: usize, volume: f64) -> f64 {
    let df = d as f64;
    (4.0 * PI).sqrt() * (gamma(1.0 + df / 2.0) * k / volume).powf(1.0 / df)
}

/// Leading behaviour of `U(z)` implied by the Weyl counting law:
/// `2 |Ω| z^{d+1} / ((4π)^{d/2} Γ(1+d/2) (d²−1))`, for `d ≥ 2`.
pub fn weyl_u(z: f64, d: usize, volume: f64) -> Result<f64> {
    require_d2(d)?;
    let df = d as f64;
    Ok(2.0 * weyl_counting(z, d, volume) * z / (df * df - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiYau {
    pub bound: f64,
    pub old_bound: f64,
}

/// Lower bound for `β̄_k`, and the earlier weaker one.
pub fn li_yau_lower(k: usize, d: usize, volume: f64) -> Result<LiYau> {
    if k == 0 || !(volume > 0.0) {
        return Err(Error::OutOfRange("li_yau_lower needs k ≥ 1 and positive volume".into()));
    }
    let df = d as f64;
    let w = weyl_beta(k as f64, d, volume);
    let old_factor = (df - 1.0) * 2f64.powf(1.0 / df);
    // the improved coefficient d dominates (d−1)2^{1/d}
    debug_assert!(old_factor <= df);
    Ok(LiYau { bound: w * df / (df + 1.0), old_bound: w * old_factor / (df + 1.0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bathtub {
    pub radius: f64,
    pub bound: f64,
    pub integral: f64,
}

/// Bathtub estimate for `w(ξ) = |ξ|^p` on sampled data.
///
/// `f` and `norms` hold the samples and `|ξ|` at each quadrature node, all
/// with weight `cell`.
pub fn hormander_bathtub(
    f: &[f64],
    norms: &[f64],
    cell: f64,
    m1: f64,
    m2: f64,
    p: f64,
    d: usize,
) -> Result<Bathtub> {
    if f.len() != norms.len() {
        return Err(Error::DimensionMismatch { expected: norms.len(), got: f.len() });
    }
    if !(m1 > 0.0 && m2 > 0.0 && p >= 0.0 && d >= 1) {
        return Err(Error::OutOfRange("bathtub needs M1, M2 > 0, p ≥ 0, d ≥ 1".into()));
    }
    if let Some(v) = f.iter().find(|v| !(**v >= 0.0 && **v <= m1 * (1.0 + 1e-12))) {
        return Err(Error::Precondition(format!("sample {v} outside [0, M1]")));
    }
    let moment: f64 = f.iter().zip(norms).map(|(v, r)| v * r.powf(p)).sum::<f64>() * cell;
    if moment > m2 * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("weighted moment {moment} exceeds M2 = {m2}")));
    }
    let df = d as f64;
    let omega = 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0);
    let radius = (m2 * (df + p) / (m1 * omega)).powf(1.0 / (df + p));
    let bound = PI.powf(df / 2.0) * m1 * radius.powf(df) / gamma(1.0 + df / 2.0);
    Ok(Bathtub { radius, bound, integral: f.iter().sum::<f64>() * cell })
}
