//! Exact-identity suites that need no spectra: the commutator trace sums
//! on random matrices, Legendre duality, the bathtub estimate and the
//! closed-form constant identities.

use crate::bounds::{self, interacting, trace, Constants};
use crate::eigensolve::solve_dense;
use crate::error::Result;
use crate::stats::EigenvalueList;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct SelftestLine {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn line(name: &'static str, pass: bool, detail: String) -> SelftestLine {
    SelftestLine { name, pass, detail }
}

pub fn run_selftest(seed: u64) -> Result<Vec<SelftestLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        trace_suite(&mut rng)?,
        legendre_suite(&mut rng)?,
        bathtub_suite(&mut rng)?,
        constant_identities()?,
        alpha_identities()?,
    ])
}

/// Random symmetric `n × n` with entries uniform in `[−1, 1]`.
pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    (&a + a.transpose()) * 0.5
}

/// Both trace sums at every midpoint of 50 random matrices; returns the
/// number of violations of `≤ 1e−9 n β_max²` and the worst scaled value.
pub fn trace_violations(rng: &mut impl Rng, matrices: usize) -> Result<(usize, f64)> {
    let (mut bad, mut worst) = (0, f64::NEG_INFINITY);
    for _ in 0..matrices {
        let n = rng.random_range(2..=60);
        let h = random_symmetric(rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let spec = solve_dense(&h, true)?;
        let vecs = spec.eigenvectors.as_deref().unwrap_or_default();
        for w in spec.eigenvalues.windows(2) {
            let z = 0.5 * (w[0] + w[1]);
            let t = trace::trace_inequality_check(&h, &spec.eigenvalues, vecs, &x, z)?;
            let tol = bounds::EXACT_TOLERANCE * t.scale;
            bad += (t.r1 > tol) as usize + (t.r2 > tol) as usize;
            worst = worst.max(t.r1.max(t.r2) / t.scale);
        }
    }
    Ok((bad, worst))
}

fn trace_suite(rng: &mut impl Rng) -> Result<SelftestLine> {
    let (bad, worst) = trace_violations(rng, 50)?;
    Ok(line("trace_inequalities", bad == 0, format!("{bad} violations, max scaled sum {worst:.3e}")))
}

/// Largest gap between the closed-form Legendre transform and the scan.
pub fn legendre_gap(rng: &mut impl Rng, lists: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for _ in 0..lists {
        let k = rng.random_range(2..40);
        let l = EigenvalueList::new((0..k).map(|_| rng.random_range(0.1..20.0)).collect())?;
        for i in 1..4 * k {
            let w = i as f64 / 4.0 + rng.random_range(-0.1..0.1);
            if !(w > 0.0 && w < k as f64) {
                continue;
            }
            let a = l.legendre_r1(w)?;
            worst = worst.max((a - l.legendre_r1_scan(w, 16)).abs() / a.abs().max(1.0));
        }
    }
    Ok(worst)
}

fn legendre_suite(rng: &mut impl Rng) -> Result<SelftestLine> {
    let gap = legendre_gap(rng, 40)?;
    Ok(line("legendre_duality", gap <= bounds::EXACT_TOLERANCE, format!("max relative gap {gap:.3e}")))
}

/// Frequency grid `[−L, L]^d` with spacing `h`: node norms and cell volume.
pub fn frequency_grid(d: usize, half_width: f64, h: f64) -> (Vec<f64>, f64) {
    let n = (2.0 * half_width / h).round() as usize;
    let coord = |i: usize| -half_width + (i as f64 + 0.5) * h;
    let norms = match d {
        1 => (0..n).map(|i| coord(i).abs()).collect(),
        _ => (0..n * n).map(|i| coord(i / n).hypot(coord(i % n))).collect(),
    };
    (norms, h.powi(d as i32))
}

/// Random admissible samples: returns the worst `∫f − bound` over `trials`
/// draws, and the equality-case error relative to its lattice allowance.
pub fn bathtub_margins(rng: &mut impl Rng, trials: usize) -> Result<(f64, f64)> {
    let mut worst = f64::NEG_INFINITY;
    for t in 0..trials {
        let d = 1 + t % 2;
        let h = if d == 1 { 0.01 } else { 0.05 };
        let (norms, cell) = frequency_grid(d, 4.0, h);
        let m1 = rng.random_range(0.5..2.0);
        let p = rng.random_range(0.5..3.0);
        let decay = rng.random_range(0.5..3.0);
        let f: Vec<f64> = norms
            .iter()
            .map(|r| m1 * rng.random_range(0.0..1.0f64) * (-decay * r).exp())
            .collect();
        let moment: f64 = f.iter().zip(&norms).map(|(v, r)| v * r.powf(p)).sum::<f64>() * cell;
        let m2 = moment * (1.0 + rng.random_range(0.0..0.5));
        let b = bounds::hormander_bathtub(&f, &norms, cell, m1, m2, p, d)?;
        worst = worst.max(b.integral - b.bound);
    }
    // the extremal indicator: the lattice miscounts at most a shell of
    // width h√d/2 around the sphere
    let mut equality = 0.0f64;
    for d in 1..=2 {
        let h = if d == 1 { 0.001 } else { 0.01 };
        let (norms, cell) = frequency_grid(d, 3.0, h);
        let (m1, p, r0): (f64, f64, f64) = (1.3, 1.0, 1.7);
        let omega = if d == 1 { 2.0 } else { 2.0 * PI };
        let m2 = m1 * omega * r0.powf(d as f64 + p) / (d as f64 + p);
        let f: Vec<f64> = norms.iter().map(|r| if *r <= r0 { m1 } else { 0.0 }).collect();
        // the quadrature moment can exceed M2 by the lattice error, so the
        // admissibility test sees the tight continuum value
        let moment: f64 = f.iter().zip(&norms).map(|(v, r)| v * r.powf(p)).sum::<f64>() * cell;
        let b = bounds::hormander_bathtub(&f, &norms, cell, m1, m2.max(moment), p, d)?;
        let shell = h * (d as f64).sqrt() / 2.0;
        let allowance = m1 * omega * ((r0 + shell).powi(d as i32) - (r0 - shell).powi(d as i32)) / d as f64
            + (b.bound * ((m2.max(moment) / m2).powf(d as f64 / (d as f64 + p)) - 1.0));
        equality = equality.max((b.integral - b.bound).abs() / allowance);
        debug_assert!((b.radius - r0).abs() < 1e-2);
    }
    Ok((worst, equality))
}

fn bathtub_suite(rng: &mut impl Rng) -> Result<SelftestLine> {
    let (worst, equality) = bathtub_margins(rng, 100)?;
    let pass = worst <= 1e-6 && equality <= 1.0;
    Ok(line(
        "bathtub",
        pass,
        format!("max ∫f − bound = {worst:.3e}; equality error / lattice allowance = {equality:.2e}"),
    ))
}

fn constant_identities() -> Result<SelftestLine> {
    let mut fails = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            fails.push(what.to_string());
        }
    };
    let c1 = Constants::new(1)?;
    check((c1.c_d - 1.0 / PI).abs() < 1e-15, "c_1 = 1/π");
    check((Constants::new(2)?.omega - 2.0 * PI).abs() < 1e-14, "ω_1 = 2π");
    check(Constants::new(2)?.ratio == Some(3.0), "(d+1)/(d−1) = 3 at d = 2");
    for d in 1..6 {
        for k in [1usize, 7, 40] {
            let vol = 1.7;
            let b = bounds::weyl_beta(k as f64, d, vol);
            check((bounds::weyl_counting(b, d, vol) - k as f64).abs() < 1e-9 * k as f64, "N_Weyl(β_Weyl(k)) = k");
            let ly = bounds::li_yau_lower(k, d, vol)?;
            check((ly.bound / b - d as f64 / (d as f64 + 1.0)).abs() < 1e-14, "Li-Yau/Weyl = d/(d+1)");
            check(ly.old_bound <= ly.bound, "earlier coefficient ≤ improved");
        }
    }
    check((bounds::weyl_beta(5.0, 1, 2.0) - 5.0 * PI / 2.0).abs() < 1e-13, "β_Weyl = kπ/2 on (−1,1)");
    check((bounds::weyl_beta(9.0, 2, PI) - 6.0).abs() < 1e-13, "β_Weyl = 2√k on the unit disk");
    check((bounds::li_yau_lower(1, 2, PI)?.bound - 4.0 / 3.0).abs() < 1e-14, "Li-Yau 4/3 at d = 2, k = 1");
    check((bounds::mean_ratio_bound(1, 4, 2)? - 2.0 * 2f64.sqrt()).abs() < 1e-14, "mean ratio 2√2");
    let l = EigenvalueList::new(vec![1.0])?;
    check((bounds::riesz_lower_bound(&l, 1, 2, 3.0)?.value - 2.0).abs() < 1e-14, "Riesz bound 2 at z = 3");
    let r = bounds::ratio_root_bound(&l, 1, 2)?;
    check((r.root - 3.0).abs() < 1e-14, "β_2 ≤ 3β_1");
    check(bounds::quadratic_certificate(&l, 1, 2, r.root)?.abs() < 1e-10, "root of its own quadratic");
    let detail = if fails.is_empty() { "all identities hold".into() } else { fails.join("; ") };
    Ok(line("closed_form_identities", fails.is_empty(), detail))
}

fn alpha_identities() -> Result<SelftestLine> {
    let mut fails = Vec::new();
    let a = interacting::alpha_from_norm(0.1, 3.0, 2, PI)?;
    if interacting::alpha_from_norm(0.0, 3.0, 2, PI)? != 0.0 {
        fails.push("α(0) = 0");
    }
    if (interacting::alpha_from_norm(0.2, 3.0, 2, PI)? - 2.0 * a).abs() > 1e-15 {
        fails.push("α linear in the norm");
    }
    if (interacting::alpha_from_kernel_chain(0.1, 3.0, 2, PI)? - a).abs() > 1e-14 {
        fails.push("two α routes agree at d = 2");
    }
    if interacting::ratio_constant(0.5, 2)? != 5.0 || interacting::exponent(0.5, 2) != 2.5 {
        fails.push("α = 1/2 hand values");
    }
    let l = EigenvalueList::new(vec![1.0, 1.3, 1.9, 2.2, 2.8, 3.0, 3.5])?;
    for k in 1..7 {
        let free = bounds::ratio_root_bound(&l, k, 2)?.root;
        if (interacting::root_bound(&l, k, 2, 0.0)? - free).abs() > 1e-12 * free {
            fails.push("α = 0 root");
        }
    }
    for j in 1..3 {
        let z = bounds::riesz_threshold(&l, j, 2) * 1.2;
        let free = bounds::riesz_lower_bound(&l, j, 2, z)?.value;
        if (interacting::riesz_lower_bound(&l, j, 2, 0.0, z)?.value - free).abs() > 1e-12 * free {
            fails.push("α = 0 Riesz bound");
        }
        let free = bounds::mean_ratio_bound(j, 2 * j + 1, 2)?;
        if (interacting::mean_ratio_bound(j, 2 * j + 1, 2, 0.0)? - free).abs() > 1e-12 * free {
            fails.push("α = 0 mean ratio");
        }
    }
    let detail = if fails.is_empty() { format!("α(‖V_−‖_3 = 0.1) = {a:.6}") } else { fails.join("; ") };
    Ok(line("alpha_identities", fails.is_empty(), detail))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selftest_passes() {
        for l in run_selftest(crate::harness::config::DEFAULT_SEED).unwrap() {
            assert!(l.pass, "{l:?}");
        }
    }
}
