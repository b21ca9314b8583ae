//! Checkers: turn an [`EigenvalueList`] plus a few domain scalars into
//! [`BoundReport`]s.

use super::interacting as inter;
use super::trace::{trace_inequality_check, uvsr1_check};
use super::{
    gap_inradius_bound, li_yau_lower, mean_ratio_bound, quadratic_certificate, ratio_root_bound,
    riesz_lower_bound, riesz_threshold, weyl_beta, BoundReport, ReportContext, SlackRegime,
    DISCRETIZATION_SLACK, EXACT_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::special::bessel_zeros;
use crate::stats::{log_grid, EigenvalueList};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Round-off allowance for orderings that hold with equality in exact
/// arithmetic at equal eigenvalues.
const ORDERING_TOLERANCE: f64 = 1e-12;
/// Allowance for the mass sandwich, which holds exactly on a fixed grid.
pub const SANDWICH_TOLERANCE: f64 = 1e-8;

/// Everything a checker may consult besides the eigenvalues.
#[derive(Debug, Clone)]
pub struct CheckContext {
    pub d: usize,
    pub m: f64,
    pub volume: f64,
    pub inradius: f64,
    pub domain_id: String,
    /// Relative slack for continuum inequalities.
    pub slack: f64,
    /// Allowed `|β_k/β_Weyl(k) − 1|` over `weyl_range`.
    pub weyl_tolerance: f64,
    pub weyl_range: (usize, usize),
    /// Dirichlet Laplacian eigenvalues of the same domain.
    pub dirichlet: Option<Vec<f64>>,
    /// Whether `dirichlet` is exact (closed form or Bessel zeros).
    pub dirichlet_exact: bool,
    /// Massless eigenvalues on the same grid, for the mass sandwich.
    pub massless: Option<Vec<f64>>,
    /// Ground state of `H_{0,B}` on the unit ball.
    pub beta1_star: Option<f64>,
    /// Interaction constant when a potential is present.
    pub alpha: Option<f64>,
    /// Points per `z`-grid.
    pub z_points: usize,
}

impl CheckContext {
    pub fn new(d: usize, m: f64, volume: f64, inradius: f64, domain_id: impl Into<String>) -> Self {
        CheckContext {
            d,
            m,
            volume,
            inradius,
            domain_id: domain_id.into(),
            slack: DISCRETIZATION_SLACK,
            weyl_tolerance: if d == 1 { 0.05 } else { 0.08 },
            weyl_range: (20, 40),
            dirichlet: None,
            dirichlet_exact: false,
            massless: None,
            beta1_star: None,
            alpha: None,
            z_points: 12,
        }
    }

    fn report(&self, k: Option<usize>, j: Option<usize>, z: Option<f64>) -> ReportContext {
        ReportContext { d: self.d, m: self.m, k, j, z, domain: Some(self.domain_id.clone()) }
    }

    fn upper(&self, name: &str, anchor: &str, value: f64, bound: f64, ctx: ReportContext) -> BoundReport {
        let slack = self.slack * bound.abs();
        BoundReport::new(name, anchor, value, bound, slack, SlackRegime::Discretization, ctx)
    }

    fn exact(&self, name: &str, anchor: &str, lhs: f64, rhs: f64, scale: f64, ctx: ReportContext) -> BoundReport {
        BoundReport::new(name, anchor, lhs, rhs, scale, SlackRegime::Exact, ctx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    RatioChain,
    LiYau,
    SqrtLiYau,
    Weyl,
    Domination,
    MassSandwich,
    Riesz,
    Legendre,
    MeanRatio,
    Monotonicity,
    GapInradius,
    Interacting,
    /// Needs the assembled matrix and eigenvectors.
    Trace,
    /// Needs the assembled free matrix and eigenvectors.
    UvsR1,
}

impl Check {
    pub const ALL: [Check; 14] = [
        Check::RatioChain,
        Check::LiYau,
        Check::SqrtLiYau,
        Check::Weyl,
        Check::Domination,
        Check::MassSandwich,
        Check::Riesz,
        Check::Legendre,
        Check::MeanRatio,
        Check::Monotonicity,
        Check::GapInradius,
        Check::Interacting,
        Check::Trace,
        Check::UvsR1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::RatioChain => "ratio_chain",
            Check::LiYau => "li_yau",
            Check::SqrtLiYau => "sqrt_li_yau",
            Check::Weyl => "weyl",
            Check::Domination => "domination",
            Check::MassSandwich => "mass_sandwich",
            Check::Riesz => "riesz",
            Check::Legendre => "legendre",
            Check::MeanRatio => "mean_ratio",
            Check::Monotonicity => "monotonicity",
            Check::GapInradius => "gap_inradius",
            Check::Interacting => "interacting",
            Check::Trace => "trace",
            Check::UvsR1 => "uvsr1",
        }
    }

    pub fn parse(name: &str) -> Result<Check> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown check `{name}`")))
    }

    /// `Err` carries the reason the check cannot run in `ctx`.
    pub fn applicable(self, ctx: &CheckContext, k: usize) -> std::result::Result<(), String> {
        let free = || match ctx.alpha {
            Some(_) => Err("applies to the operator without potential".to_string()),
            None => Ok(()),
        };
        let d2 = || match ctx.d {
            d if d < 2 => Err(format!("requires d ≥ 2, the domain has d = {d}")),
            _ => Ok(()),
        };
        let min_k = |n: usize| match k {
            k if k < n => Err(format!("requires at least {n} eigenvalues, got {k}")),
            _ => Ok(()),
        };
        match self {
            Check::RatioChain | Check::Riesz => {
                d2()?;
                free()?;
                min_k(2)
            }
            Check::MeanRatio => {
                d2()?;
                free()?;
                min_k(6)
            }
            Check::LiYau | Check::Monotonicity => free(),
            Check::SqrtLiYau => match (&ctx.dirichlet, ctx.dirichlet_exact) {
                (Some(_), true) => Ok(()),
                _ => Err("needs exact Dirichlet eigenvalues (interval, rectangle or disk)".into()),
            },
            Check::Weyl => {
                free()?;
                min_k(ctx.weyl_range.0)
            }
            Check::Domination => {
                free()?;
                ctx.dirichlet.as_ref().map(|_| ()).ok_or_else(|| "needs Dirichlet eigenvalues".into())
            }
            Check::MassSandwich => {
                free()?;
                ctx.massless.as_ref().map(|_| ()).ok_or_else(|| "needs the massless spectrum".into())
            }
            Check::Legendre => min_k(2),
            Check::GapInradius => {
                d2()?;
                free()?;
                min_k(2)?;
                if ctx.m != 0.0 {
                    return Err("applies to m = 0 only".into());
                }
                ctx.beta1_star.map(|_| ()).ok_or_else(|| "needs the cached unit-ball ground state".into())
            }
            Check::Interacting => {
                d2()?;
                min_k(2)?;
                match ctx.alpha {
                    Some(_) => Ok(()),
                    None => Err("needs a potential".into()),
                }
            }
            Check::Trace | Check::UvsR1 => Ok(()),
        }
    }

    /// Checks that run on the eigenvalue list alone.
    pub fn list_based(self) -> bool {
        !matches!(self, Check::Trace | Check::UvsR1)
    }

    /// Runs a list-based check.
    pub fn run(self, list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
        if let Err(why) = self.applicable(ctx, list.len()) {
            return Err(Error::Precondition(format!("check `{}` {why}", self.name())));
        }
        match self {
            Check::RatioChain => ratio_chain(list, ctx),
            Check::LiYau => li_yau(list, ctx),
            Check::SqrtLiYau => sqrt_li_yau(ctx),
            Check::Weyl => weyl(list, ctx),
            Check::Domination => domination(list, ctx),
            Check::MassSandwich => mass_sandwich(list, ctx),
            Check::Riesz => riesz(list, ctx),
            Check::Legendre => legendre(list),
            Check::MeanRatio => mean_ratio(list, ctx),
            Check::Monotonicity => monotonicity(list, ctx, (ctx.d + 1) as f64, "monotonicity"),
            Check::GapInradius => gap_inradius(list, ctx),
            Check::Interacting => interacting(list, ctx),
            Check::Trace | Check::UvsR1 => Err(Error::Precondition(format!(
                "check `{}` needs the assembled matrix",
                self.name()
            ))),
        }
    }
}

/// Checks that apply by default: every applicable one.
pub fn default_checks(ctx: &CheckContext, k: usize, matrices: bool) -> Vec<Check> {
    Check::ALL
        .into_iter()
        .filter(|c| c.list_based() || matrices)
        .filter(|c| c.applicable(ctx, k).is_ok())
        .collect()
}

fn half(list: &EigenvalueList) -> usize {
    (list.len() / 2).min(list.len() - 1)
}

fn ratio_chain(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let d = ctx.d;
    let mut out = Vec::new();
    for k in 1..=half(list) {
        let next = list.beta(k + 1);
        let c = || ctx.report(Some(k), None, None);
        let r = match ratio_root_bound(list, k, d) {
            Ok(r) => r,
            Err(_) => {
                out.push(no_real_root("ratio_root", "universal ratio bound, larger root", next, c()));
                continue;
            }
        };
        out.push(ctx.upper("ratio_root", "universal ratio bound, larger root", next, r.root, c()));
        out.push(ctx.upper("ratio_harmonic", "simplified ratio bound, harmonic mean", next, r.simple_harmonic, c()));
        out.push(ctx.upper("ratio_mean", "simplified ratio bound, arithmetic mean", next, r.simple_mean, c()));
        if k == 1 {
            out.push(ctx.upper("fundamental_ratio", "β_2/β_1 ≤ (d+1)/(d−1)", next / list.beta(1), (d as f64 + 1.0) / (d as f64 - 1.0), c()));
        }
        let q = quadratic_certificate(list, k, d, next)?;
        let scale = ctx.slack * 2.0 * d as f64 * next;
        out.push(BoundReport::new("quadratic_certificate", "quadratic in β_{k+1}", q, 0.0, scale, SlackRegime::Discretization, c()));
        out.push(ctx.exact("chain_root_harmonic", "root ≤ harmonic form", r.root, r.simple_harmonic, ORDERING_TOLERANCE * r.simple_harmonic, c()));
        out.push(ctx.exact("chain_harmonic_mean", "harmonic form ≤ mean form", r.simple_harmonic, r.simple_mean, ORDERING_TOLERANCE * r.simple_mean, c()));
    }
    Ok(out)
}

/// A quadratic with no real root admits no `β_{k+1}` at all: always a failure.
fn no_real_root(name: &str, anchor: &str, next: f64, ctx: ReportContext) -> BoundReport {
    let mut r = BoundReport::new(name, anchor, next, f64::NAN, 0.0, SlackRegime::Discretization, ctx);
    r.pass = false;
    r
}

fn li_yau(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for k in 1..=list.len().div_ceil(2) {
        let b = li_yau_lower(k, ctx.d, ctx.volume)?;
        let c = ctx.report(Some(k), None, None);
        out.push(ctx.upper("li_yau", "mean eigenvalue lower bound", b.bound, list.mean(k), c.clone()));
        out.push(ctx.exact("li_yau_improves", "earlier coefficient ≤ improved", b.old_bound, b.bound, ORDERING_TOLERANCE * b.bound, c));
    }
    Ok(out)
}

fn sqrt_li_yau(ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let lambda = ctx.dirichlet.as_deref().unwrap_or_default();
    let mut out = Vec::new();
    let mut acc = 0.0;
    for (i, l) in lambda.iter().enumerate() {
        let k = i + 1;
        acc += l.sqrt();
        let b = li_yau_lower(k, ctx.d, ctx.volume)?;
        out.push(BoundReport::new(
            "sqrt_li_yau",
            "mean of √λ_k lower bound",
            b.bound,
            acc / k as f64,
            0.0,
            SlackRegime::Exact,
            ctx.report(Some(k), None, None),
        ));
    }
    Ok(out)
}

fn weyl(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let (lo, hi) = ctx.weyl_range;
    Ok((lo..=hi.min(list.len()))
        .map(|k| {
            let w = weyl_beta(k as f64, ctx.d, ctx.volume);
            BoundReport::new(
                "weyl",
                "|β_k/β_Weyl(k) − 1|",
                (list.beta(k) / w - 1.0).abs(),
                ctx.weyl_tolerance,
                0.0,
                SlackRegime::Discretization,
                ctx.report(Some(k), None, None),
            )
        })
        .collect())
}

fn domination(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let lambda = ctx.dirichlet.as_deref().unwrap_or_default();
    Ok(lambda
        .iter()
        .take(list.len())
        .enumerate()
        .map(|(i, l)| {
            let bound = (l + ctx.m * ctx.m).sqrt();
            ctx.upper("domination", "β_k ≤ √(λ_k + m²)", list.beta(i + 1), bound, ctx.report(Some(i + 1), None, None))
        })
        .collect())
}

fn mass_sandwich(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let base = ctx.massless.as_deref().unwrap_or_default();
    let mut out = Vec::new();
    for (i, b0) in base.iter().take(list.len()).enumerate() {
        let diff = list.beta(i + 1) - b0;
        let c = ctx.report(Some(i + 1), None, None);
        out.push(ctx.exact("mass_sandwich_lower", "β_k(0) ≤ β_k(m)", 0.0, diff, SANDWICH_TOLERANCE, c.clone()));
        out.push(ctx.exact("mass_sandwich_upper", "β_k(m) ≤ β_k(0) + m", diff, ctx.m, SANDWICH_TOLERANCE, c));
    }
    Ok(out)
}

/// `z`-grid from `lo` to the top of the list, empty when `lo` is above it.
fn z_grid(lo: f64, list: &EigenvalueList, n: usize) -> Vec<f64> {
    if lo >= list.ceiling() {
        return Vec::new();
    }
    log_grid(lo, list.ceiling(), n)
}

fn riesz(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for j in 1..=half(list) {
        for z in z_grid(riesz_threshold(list, j, ctx.d), list, ctx.z_points) {
            let b = riesz_lower_bound(list, j, ctx.d, z)?;
            let r = list.riesz_mean_1(z);
            out.push(
                ctx.upper("riesz", "R_1(z) lower bound", b.value, r.value, ctx.report(None, Some(j), Some(z)))
                    .truncated(b.truncated || r.truncated),
            );
        }
    }
    Ok(out)
}

fn legendre(list: &EigenvalueList) -> Result<Vec<BoundReport>> {
    let kk = list.len();
    let mut out = Vec::new();
    for i in 1..4 * kk {
        let w = i as f64 / 4.0;
        let closed = list.legendre_r1(w)?;
        let scan = list.legendre_r1_scan(w, 64);
        let tol = EXACT_TOLERANCE * closed.abs().max(1.0);
        let ctx = ReportContext { z: Some(w), ..ReportContext::default() };
        // two one-sided reports would double the rows; |difference| ≤ tol
        out.push(BoundReport::new("legendre", "closed form vs sup over z", (closed - scan).abs(), 0.0, tol, SlackRegime::Exact, ctx));
    }
    Ok(out)
}

fn mean_ratio(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let top = list.len() / 2;
    let mut out = Vec::new();
    for j in 1..=top {
        for k in (2 * j + 1)..=top {
            let b = mean_ratio_bound(j, k, ctx.d)?;
            out.push(ctx.upper("mean_ratio", "β̄_k/β̄_j upper bound", list.mean(k) / list.mean(j), b, ctx.report(Some(k), Some(j), None)));
        }
    }
    Ok(out)
}

fn monotonicity(list: &EigenvalueList, ctx: &CheckContext, p: f64, name: &str) -> Result<Vec<BoundReport>> {
    let grid = list.log_grid(40 * list.len().max(2));
    let m = list.monotonicity_profile(p, &grid)?;
    Ok(vec![BoundReport::new(
        name,
        "U(z)/z^p nondecreasing",
        -m.worst_difference,
        0.0,
        EXACT_TOLERANCE * m.scale.max(f64::MIN_POSITIVE),
        SlackRegime::Exact,
        ctx.report(None, None, Some(m.at)),
    )])
}

/// `√λ_1` of the unit ball: the first zero of `J_{d/2−1}`.
pub fn unit_ball_sqrt_lambda1(d: usize) -> Result<f64> {
    match d {
        3 => Ok(std::f64::consts::PI),
        d if d >= 2 && d % 2 == 0 => Ok(bessel_zeros((d / 2 - 1) as u32, d as f64 + 4.0)[0]),
        _ => Err(Error::Unsupported(format!("unit-ball Dirichlet value for d = {d}"))),
    }
}

fn gap_inradius(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let star = ctx.beta1_star.unwrap_or_default();
    let sqrt_l1 = unit_ball_sqrt_lambda1(ctx.d)?;
    let (strong, weak) = gap_inradius_bound(ctx.d, star, sqrt_l1, ctx.inradius)?;
    let gap = list.beta(2) - list.beta(1);
    let c = || ctx.report(Some(2), None, None);
    Ok(vec![
        ctx.upper("gap_inradius", "β_2 − β_1 ≤ (2/(d−1)) β_1*/Inr", gap, strong, c()),
        ctx.upper("gap_inradius_weak", "β_2 − β_1 ≤ (2/(d−1)) √λ_1*/Inr", gap, weak, c()),
        ctx.exact("ball_domination", "β_1* ≤ √λ_1*", star, sqrt_l1, 0.0, c()),
    ])
}

fn interacting(list: &EigenvalueList, ctx: &CheckContext) -> Result<Vec<BoundReport>> {
    let (d, alpha) = (ctx.d, ctx.alpha.unwrap_or_default());
    let mut out = vec![BoundReport::new(
        "admissibility",
        "α < 1",
        alpha,
        1.0,
        0.0,
        SlackRegime::Exact,
        ctx.report(None, None, None),
    )];
    if alpha >= 1.0 {
        return Ok(out);
    }
    let rc = inter::ratio_constant(alpha, d)?;
    for k in 1..=half(list) {
        let next = list.beta(k + 1);
        let mid = list.mean_inverse(k) * next;
        let c = || ctx.report(Some(k), None, None);
        out.push(ctx.exact("interacting_ratio_left", "β_{k+1}/β̄_k ≤ β̄_k^{−1} β_{k+1}", next / list.mean(k), mid, ORDERING_TOLERANCE * mid, c()));
        out.push(ctx.upper("interacting_ratio", "β̄_k^{−1} β_{k+1} ≤ 1 + 2/((d−1)(1−α))", mid, rc, c()));
        match inter::root_bound(list, k, d, alpha) {
            Ok(root) => out.push(ctx.upper("interacting_root", "β_{k+1} below larger root", next, root, c())),
            Err(_) => out.push(no_real_root("interacting_root", "β_{k+1} below larger root", next, c())),
        }
        if let (Ok(free), Ok(zero)) = (ratio_root_bound(list, k, d), inter::root_bound(list, k, d, 0.0)) {
            let tol = ORDERING_TOLERANCE * free.root;
            out.push(ctx.exact("alpha_zero_root", "α = 0 root equals the free root", (zero - free.root).abs(), 0.0, tol, c()));
        }
    }
    for j in 1..=half(list) {
        for z in z_grid(inter::riesz_threshold(list, j, d, alpha), list, ctx.z_points) {
            let b = inter::riesz_lower_bound(list, j, d, alpha, z)?;
            let r = list.riesz_mean_1(z);
            out.push(
                ctx.upper("interacting_riesz", "R_1(z) lower bound with α", b.value, r.value, ctx.report(None, Some(j), Some(z)))
                    .truncated(b.truncated || r.truncated),
            );
        }
    }
    let top = list.len() / 2;
    for j in 1..=top {
        for k in (2 * j + 1)..=top {
            let b = inter::mean_ratio_bound(j, k, d, alpha)?;
            out.push(ctx.upper("interacting_mean_ratio", "β̄_k/β̄_j upper bound with α", list.mean(k) / list.mean(j), b, ctx.report(Some(k), Some(j), None)));
        }
    }
    out.extend(monotonicity(list, ctx, inter::exponent(alpha, d), "interacting_monotonicity")?);
    Ok(out)
}

/// Trace inequalities on the assembled matrix, one report per coordinate
/// axis and per midpoint between consecutive eigenvalues.
pub fn trace_reports(
    h: &DMatrix<f64>,
    values: &[f64],
    vectors: &[Vec<f64>],
    coordinates: &[Vec<f64>],
    ctx: &CheckContext,
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let count = values.len().min(ctx.z_points.max(2) * 2);
    for (axis, x) in coordinates.iter().enumerate() {
        for w in values[..count].windows(2) {
            if w[1] - w[0] <= super::super::eigensolve::TIE_TOLERANCE * w[1].abs() {
                continue;
            }
            let z = 0.5 * (w[0] + w[1]);
            let t = trace_inequality_check(h, values, vectors, x, z)?;
            let tol = EXACT_TOLERANCE * t.scale;
            let c = ReportContext { j: Some(axis), ..ctx.report(None, None, Some(z)) };
            out.push(ctx.exact("trace_r1", "first commutator trace sum ≤ 0", t.r1, 0.0, tol, c.clone()));
            out.push(ctx.exact("trace_r2", "second commutator trace sum ≤ 0", t.r2, 0.0, tol, c));
        }
    }
    Ok(out)
}

/// `U`-versus-`R_1` inequality at midpoints, using the free matrix for
/// `H^{−1}`. Without a potential the two evaluation paths are also compared.
pub fn uvsr1_reports(
    free: &DMatrix<f64>,
    values: &[f64],
    vectors: &[Vec<f64>],
    ctx: &CheckContext,
) -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let count = values.len().min(ctx.z_points.max(2) * 2);
    for w in values[..count].windows(2) {
        let z = 0.5 * (w[0] + w[1]);
        let r = uvsr1_check(free, values, vectors, ctx.d, z)?;
        let c = ctx.report(None, None, Some(z));
        let slack = ctx.slack * r.scale;
        out.push(BoundReport::new("uvsr1", "(d−1)Σ(z−β)²⟨u,H⁻¹u⟩ − 2Σ(z−β) ≤ 0", r.value, 0.0, slack, SlackRegime::Discretization, c.clone()));
        if ctx.alpha.is_none() {
            out.push(ctx.exact("uvsr1_dual_path", "⟨u,H⁻¹u⟩ = 1/β", (r.value - r.reduced).abs(), 0.0, 1e-10 * (1.0 + r.scale), c));
        }
    }
    Ok(out)
}
