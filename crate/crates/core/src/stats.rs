//! Statistics of a finite eigenvalue list.
//!
//! A finite list only represents the true spectrum below its largest
//! entry, so every evaluation above `β_K` carries a truncation flag.

use crate::error::{Error, Result};
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub value: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueList {
    values: Vec<f64>,
    /// Prefix sums of `β` and `1/β`, with a leading zero.
    sum: Vec<f64>,
    sum_inv: Vec<f64>,
}

impl EigenvalueList {
    /// Sorts the input; entries must be finite and positive.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Precondition("empty eigenvalue list".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Precondition(format!("eigenvalue {v} is not positive")));
        }
        values.sort_by(f64::total_cmp);
        let mut sum = vec![0.0];
        let mut sum_inv = vec![0.0];
        for v in &values {
            sum.push(sum.last().unwrap() + v);
            sum_inv.push(sum_inv.last().unwrap() + 1.0 / v);
        }
        Ok(EigenvalueList { values, sum, sum_inv })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `β_k`, 1-based.
    pub fn beta(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn ceiling(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `N(β) = #{j : β_j ≤ β}`.
    pub fn counting_function(&self, beta: f64) -> usize {
        self.values.partition_point(|v| *v <= beta)
    }

    /// `(1/k) Σ_{j≤k} β_j^r`.
    pub fn moment_mean(&self, k: usize, r: f64) -> Result<f64> {
        self.check_index(k)?;
        Ok(if r == 1.0 {
            self.sum[k] / k as f64
        } else if r == -1.0 {
            self.sum_inv[k] / k as f64
        } else {
            self.values[..k].iter().map(|b| b.powf(r)).sum::<f64>() / k as f64
        })
    }

    /// `β̄_k`.
    pub fn mean(&self, k: usize) -> f64 {
        self.sum[k] / k as f64
    }

    /// `β̄_k^{−1}`.
    pub fn mean_inverse(&self, k: usize) -> f64 {
        self.sum_inv[k] / k as f64
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.len() {
            return Err(Error::OutOfRange(format!("index {k} outside 1..={}", self.len())));
        }
        Ok(())
    }

    fn flag(&self, z: f64, value: f64) -> Evaluation {
        Evaluation { value, truncated: z > self.ceiling() }
    }

    /// `R_1(z) = Σ (z − β_k)_+`.
    pub fn riesz_mean_1(&self, z: f64) -> Evaluation {
        let j = self.counting_function(z);
        self.flag(z, j as f64 * z - self.sum[j])
    }

    /// `U(z) = Σ (z − β_k)_+² / β_k`, summed term by term.
    pub fn u_function(&self, z: f64) -> Evaluation {
        let value: f64 = self.values.iter().map(|b| (z - b).max(0.0).powi(2) / b).sum();
        debug_assert!({
            let alt = self.u_quadratic(z);
            (alt - value).abs() <= 1e-12 * value.abs().max(z * z * self.sum_inv[self.len()]).max(1e-300)
        });
        self.flag(z, value)
    }

    /// `U(z)` from the quadratic form valid on `[β_j, β_{j+1}]`:
    /// `U/j = β̄_j^{−1} z² − 2z + β̄_j`.
    pub fn u_quadratic(&self, z: f64) -> f64 {
        let j = self.counting_function(z);
        if j == 0 {
            return 0.0;
        }
        let jf = j as f64;
        jf * (self.mean_inverse(j) * z * z - 2.0 * z + self.mean(j))
    }

    /// `Z(t) = Σ e^{−β_j t}` and the crude tail bound `K e^{−β_K t}` for the
    /// omitted part of the spectrum.
    pub fn partition_function(&self, t: f64) -> Result<(f64, f64)> {
        if !(t > 0.0) {
            return Err(Error::OutOfRange(format!("time {t} must be positive")));
        }
        let z = self.values.iter().map(|b| (-b * t).exp()).sum();
        Ok((z, self.len() as f64 * (-self.ceiling() * t).exp()))
    }

    /// `R_1^*(w) = (w − [w]) β_{[w]+1} + [w] β̄_{[w]}` for `0 < w < K`.
    pub fn legendre_r1(&self, w: f64) -> Result<f64> {
        if !(w > 0.0 && w < self.len() as f64) {
            return Err(Error::OutOfRange(format!("w = {w} outside (0, {})", self.len())));
        }
        let fl = w.floor();
        let n = fl as usize;
        Ok((w - fl) * self.values[n] + self.sum[n])
    }

    /// `sup_z (wz − R_1(z))` by scanning every breakpoint and a uniform grid.
    pub fn legendre_r1_scan(&self, w: f64, grid: usize) -> f64 {
        let (lo, hi) = (0.0, 2.0 * self.ceiling());
        let uniform = (0..=grid).map(|i| lo + (hi - lo) * i as f64 / grid as f64);
        self.values
            .iter()
            .copied()
            .chain(uniform)
            .map(|z| w * z - self.riesz_mean_1(z).value)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `n` log-spaced points over `[β_1, β_K]`.
    pub fn log_grid(&self, n: usize) -> Vec<f64> {
        log_grid(self.values[0], self.ceiling(), n)
    }

    /// Smallest consecutive difference of `U(z)/z^p` on `grid`.
    pub fn monotonicity_profile(&self, p: f64, grid: &[f64]) -> Result<Monotonicity> {
        let (lo, hi) = (self.values[0], self.ceiling());
        if grid.len() < 2 {
            return Err(Error::OutOfRange("monotonicity needs at least two grid points".into()));
        }
        if grid.iter().any(|z| *z < lo * (1.0 - 1e-12) || *z > hi * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange(format!("z-grid must lie in [{lo}, {hi}]")));
        }
        let ratio: Vec<f64> = grid.iter().map(|&z| self.u_function(z).value / z.powf(p)).collect();
        let scale = ratio.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let (mut worst, mut at) = (f64::INFINITY, grid[0]);
        for i in 1..grid.len() {
            let d = ratio[i] - ratio[i - 1];
            if d < worst {
                worst = d;
                at = grid[i];
            }
        }
        Ok(Monotonicity { exponent: p, worst_difference: worst, at, scale })
    }

    pub fn profile(&self, p: f64, grid: &[f64]) -> Vec<ProfileRow> {
        grid.iter()
            .map(|&z| {
                let u = self.u_function(z).value;
                ProfileRow {
                    z,
                    counting: self.counting_function(z),
                    riesz: self.riesz_mean_1(z).value,
                    u,
                    u_ratio: u / z.powf(p),
                    weyl_counting: None,
                    weyl_u: None,
                }
            })
            .collect()
    }
}

pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 || hi <= lo {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Monotonicity {
    pub exponent: f64,
    /// `min_i [g(z_{i+1}) − g(z_i)]` for `g = U/z^p`.
    pub worst_difference: f64,
    pub at: f64,
    /// `max |g|` on the grid.
    pub scale: f64,
}

impl Monotonicity {
    /// Nondecreasing up to `tol` (absolute).
    pub fn holds(&self, tol: f64) -> bool {
        self.worst_difference >= -tol
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub z: f64,
    pub counting: usize,
    pub riesz: f64,
    pub u: f64,
    pub u_ratio: f64,
    pub weyl_counting: Option<f64>,
    pub weyl_u: Option<f64>,
}

pub fn write_profile_csv(rows: &[ProfileRow], out: &mut impl Write) -> Result<()> {
    writeln!(out, "z,N,R1,U,U_over_z_p,N_weyl,U_weyl")?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{:.17e},{},{:.17e},{:.17e},{:.17e},{},{}",
            r.z,
            r.counting,
            r.riesz,
            r.u,
            r.u_ratio,
            opt(r.weyl_counting),
            opt(r.weyl_u)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn list(v: &[f64]) -> EigenvalueList {
        EigenvalueList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn counting() {
        let l = list(&[1.0, 2.0, 3.0]);
        assert_eq!(l.counting_function(0.5), 0);
        assert_eq!(l.counting_function(2.0), 2);
        assert_eq!(l.counting_function(3.0), 3);
        assert!(EigenvalueList::new(vec![1.0, -1.0]).is_err());
        assert!(EigenvalueList::new(vec![]).is_err());
    }

    #[test]
    fn moments() {
        let l = list(&[1.0, 2.0, 3.0]);
        assert_eq!(l.moment_mean(1, 1.0).unwrap(), 1.0);
        assert_eq!(l.moment_mean(3, 1.0).unwrap(), 2.0);
        let l = list(&[1.0, 2.0, 4.0]);
        assert!((l.moment_mean(3, -1.0).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert!((l.moment_mean(2, 2.0).unwrap() - 2.5).abs() < 1e-15);
        assert!(l.moment_mean(4, 1.0).is_err());
        assert!(l.moment_mean(0, 1.0).is_err());
    }

    #[test]
    fn riesz_and_u_values() {
        let l = list(&[1.0, 2.0]);
        assert_eq!(l.riesz_mean_1(0.5).value, 0.0);
        assert_eq!(l.riesz_mean_1(1.0).value, 0.0);
        let r = l.riesz_mean_1(3.0);
        assert_eq!(r.value, 3.0);
        assert!(r.truncated);
        assert!(!l.riesz_mean_1(2.0).truncated);
        assert_eq!(l.u_function(1.0).value, 0.0);
        assert!((l.u_function(3.0).value - 4.5).abs() < 1e-15);
        assert!((l.u_quadratic(3.0) - 4.5).abs() < 1e-14);
    }

    #[test]
    fn partition() {
        let l = list(&[1.0]);
        let (z, tail) = l.partition_function(1.0).unwrap();
        assert!((z - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(tail, z);
        assert!(l.partition_function(0.0).is_err());
        let l = list(&[1.0, 2.5, 3.0]);
        let mut prev = f64::INFINITY;
        for i in 1..60 {
            let z = l.partition_function(i as f64 * 0.5).unwrap().0;
            assert!(z < prev);
            prev = z;
        }
        assert!(prev < 1e-12);
    }

    #[test]
    fn legendre_values() {
        let l = list(&[1.0, 2.0, 3.0]);
        assert!((l.legendre_r1(2.5).unwrap() - 4.5).abs() < 1e-15);
        assert!((l.legendre_r1(1.0 - 1e-12).unwrap() - 1.0).abs() < 1e-11);
        assert_eq!(l.legendre_r1(1.0).unwrap(), 1.0);
        assert_eq!(l.legendre_r1(2.0).unwrap(), 3.0);
        assert!(l.legendre_r1(3.0).is_err());
        assert!(l.legendre_r1(0.0).is_err());
    }

    #[test]
    fn single_eigenvalue_profile() {
        // g(z) = (z−β)²/(β z^p) grows on z ≥ β for p = 2, and for p = 3 only
        // up to z = 3β where g' = g(2/(z−β) − 3/z) changes sign
        let b = 1.7;
        let g = |z: f64, p: f64| (z - b).powi(2) / (b * z.powf(p));
        let mut prev = 0.0;
        for i in 0..2000 {
            let z = b * (1.0 + i as f64 * 0.01);
            let v = g(z, 2.0);
            assert!(v >= prev);
            prev = v;
        }
        let mut prev = 0.0;
        for i in 0..=200 {
            let z = b * (1.0 + i as f64 * 0.01);
            let v = g(z, 3.0);
            assert!(v >= prev);
            prev = v;
        }
        assert!(g(3.5 * b, 3.0) < g(3.0 * b, 3.0));
        // and the list evaluator agrees with the hand formula
        let l = list(&[b]);
        assert!((l.u_function(2.0 * b).value / (2.0 * b).powi(3) - g(2.0 * b, 3.0)).abs() < 1e-15);
    }

    #[test]
    fn detector_flags_spread_list() {
        // a lone low eigenvalue far below the rest breaks U/z³ monotonicity
        let l = list(&[1.0, 10.0, 10.5, 11.0]);
        let m = l.monotonicity_profile(3.0, &l.log_grid(512)).unwrap();
        assert!(!m.holds(1e-9));
        // an evenly spread d = 1 list passes with p = 2
        let v: Vec<f64> = (1..=30).map(|k| k as f64).collect();
        let l = list(&v);
        let m = l.monotonicity_profile(2.0, &l.log_grid(512)).unwrap();
        assert!(m.holds(1e-9));
        assert!(l.monotonicity_profile(2.0, &[0.5, 1.0]).is_err());
    }

    #[test]
    fn profile_csv() {
        let l = list(&[1.0, 2.0]);
        let rows = l.profile(2.0, &l.log_grid(4));
        let mut buf = Vec::new();
        write_profile_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("z,N,R1,U,"));
    }

    fn spectra() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.1f64..50.0, 1..40)
    }

    proptest! {
        #[test]
        fn u_paths_agree(v in spectra(), t in 0.0f64..1.2) {
            let l = EigenvalueList::new(v).unwrap();
            let z = l.beta(1) + t * (l.ceiling() - l.beta(1));
            let a = l.u_function(z).value;
            let b = l.u_quadratic(z);
            let scale = z * z * l.mean_inverse(l.len()) * l.len() as f64;
            prop_assert!((a - b).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn riesz_convex(v in spectra(), a in 0.0f64..60.0, b in 0.0f64..60.0) {
            let l = EigenvalueList::new(v).unwrap();
            let mid = l.riesz_mean_1(0.5 * (a + b)).value;
            let avg = 0.5 * (l.riesz_mean_1(a).value + l.riesz_mean_1(b).value);
            prop_assert!(mid <= avg + 1e-12 * (1.0 + avg));
            let direct: f64 = l.values().iter().map(|x| (a - x).max(0.0)).sum();
            prop_assert!((l.riesz_mean_1(a).value - direct).abs() <= 1e-11 * (1.0 + direct));
        }

        #[test]
        fn monotone_in_z(v in spectra(), a in 0.0f64..60.0, b in 0.0f64..60.0) {
            let l = EigenvalueList::new(v).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(l.counting_function(lo) <= l.counting_function(hi));
            prop_assert!(l.riesz_mean_1(lo).value <= l.riesz_mean_1(hi).value + 1e-12);
            prop_assert!(l.u_function(lo).value <= l.u_function(hi).value + 1e-12);
            let (zl, _) = l.partition_function(lo + 0.01).unwrap();
            let (zh, _) = l.partition_function(hi + 0.01).unwrap();
            prop_assert!(zh <= zl);
        }

        #[test]
        fn partition_log_convex(v in spectra(), t in 0.05f64..3.0) {
            let l = EigenvalueList::new(v).unwrap();
            let h = 0.01;
            let f = |s: f64| l.partition_function(s).unwrap().0.ln();
            prop_assert!(f(t + h) - 2.0 * f(t) + f(t - h) >= -1e-10);
        }

        #[test]
        fn legendre_duality(v in spectra(), frac in 0.0f64..1.0) {
            let l = EigenvalueList::new(v).unwrap();
            let kk = l.len() as f64;
            prop_assume!(kk > 0.2);
            let w = 0.1f64.min(kk / 2.0) + frac * (kk - 2.0 * 0.1f64.min(kk / 2.0));
            prop_assume!(w.fract() != 0.0 && w > 0.0 && w < kk);
            let exact = l.legendre_r1(w).unwrap();
            let scan = l.legendre_r1_scan(w, 2000);
            prop_assert!((exact - scan).abs() <= 1e-9 * (1.0 + exact.abs()));
        }

        #[test]
        fn cauchy_schwarz_means(v in spectra()) {
            let l = EigenvalueList::new(v).unwrap();
            for k in 1..=l.len() {
                prop_assert!(l.mean(k) * l.mean_inverse(k) >= 1.0 - 1e-12);
            }
        }
    }
}
