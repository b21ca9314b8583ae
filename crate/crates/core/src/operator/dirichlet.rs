//! Eigenvalues `λ_k` of the Dirichlet Laplacian, the comparison partner of
//! the Klein-Gordon spectrum.

use super::LinearOperator;
use crate::eigensolve::{solve_dense, solve_lanczos, LanczosOptions};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Shape};
use crate::special::bessel_zeros;
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DirichletMethod {
    ClosedForm,
    BesselZeros,
    /// Five-point finite differences on the mask; first-order accurate in
    /// `h` at curved or staircase boundaries and biased upward there.
    FiniteDifference,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirichletSpectrum {
    pub values: Vec<f64>,
    pub method: DirichletMethod,
}

pub fn dirichlet_laplacian_spectrum(domain: &DomainSpec, count: usize) -> Result<DirichletSpectrum> {
    if count == 0 {
        return Err(Error::OutOfRange("eigenvalue count must be positive".into()));
    }
    match domain.shape {
        Shape::Interval { a, b } => Ok(DirichletSpectrum {
            values: interval_values(b - a, count),
            method: DirichletMethod::ClosedForm,
        }),
        Shape::Rectangle { widths } => {
            let (x, y) = (interval_values(widths[0], count), interval_values(widths[1], count));
            let mut all: Vec<f64> = x.iter().flat_map(|u| y.iter().map(move |v| u + v)).collect();
            all.sort_by(f64::total_cmp);
            all.truncate(count);
            Ok(DirichletSpectrum { values: all, method: DirichletMethod::ClosedForm })
        }
        Shape::Disk { radius } => Ok(DirichletSpectrum {
            values: disk_values(radius, count),
            method: DirichletMethod::BesselZeros,
        }),
        _ => finite_difference(domain, count),
    }
}

fn interval_values(length: f64, count: usize) -> Vec<f64> {
    (1..=count).map(|k| (k as f64 * PI / length).powi(2)).collect()
}

/// `j_{ν,n}² / R²`, each `ν ≥ 1` counted twice.
pub fn disk_values(radius: f64, count: usize) -> Vec<f64> {
    // Weyl: about x²/4 values below x² on the unit disk
    let mut x_max = 2.0 * (count as f64).sqrt() + 8.0;
    loop {
        let mut zeros = Vec::new();
        let mut nu = 0u32;
        while (nu as f64) < x_max {
            let z = bessel_zeros(nu, x_max);
            if z.is_empty() {
                break;
            }
            let mult = if nu == 0 { 1 } else { 2 };
            for j in z {
                zeros.extend(std::iter::repeat_n(j, mult));
            }
            nu += 1;
        }
        if zeros.len() >= count {
            zeros.sort_by(f64::total_cmp);
            return zeros[..count].iter().map(|j| (j / radius).powi(2)).collect();
        }
        x_max *= 1.5;
    }
}

/// `−Δ_h` on the interior cells with zero values outside the mask.
pub struct FiniteDifferenceLaplacian {
    diag: f64,
    off: f64,
    neighbours: Vec<Vec<usize>>,
}

impl FiniteDifferenceLaplacian {
    pub fn new(domain: &DomainSpec) -> Self {
        let d = domain.dimension();
        let m = domain.box_points;
        let h2 = domain.cell_size * domain.cell_size;
        let lookup = |box_idx: usize| domain.interior.binary_search(&box_idx).ok();
        let neighbours = domain
            .interior
            .iter()
            .map(|&idx| {
                let mut out = Vec::with_capacity(2 * d);
                let mut stride = 1;
                for _ in 0..d {
                    // the outer box layer is never interior, so ± stride stays in range
                    for nb in [idx - stride, idx + stride] {
                        if let Some(j) = lookup(nb) {
                            out.push(j);
                        }
                    }
                    stride *= m;
                }
                out
            })
            .collect();
        FiniteDifferenceLaplacian { diag: 2.0 * d as f64 / h2, off: -1.0 / h2, neighbours }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.neighbours.len();
        let mut a = DMatrix::from_diagonal_element(n, n, self.diag);
        for (i, nb) in self.neighbours.iter().enumerate() {
            for &j in nb {
                a[(i, j)] = self.off;
            }
        }
        a
    }
}

impl LinearOperator for FiniteDifferenceLaplacian {
    fn dim(&self) -> usize {
        self.neighbours.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, nb) in self.neighbours.iter().enumerate() {
            y[i] = self.diag * x[i] + self.off * nb.iter().map(|&j| x[j]).sum::<f64>();
        }
    }
}

const FD_DENSE_CUTOFF: usize = 1500;

fn finite_difference(domain: &DomainSpec, count: usize) -> Result<DirichletSpectrum> {
    let lap = FiniteDifferenceLaplacian::new(domain);
    let n = lap.dim();
    if count > n {
        return Err(Error::OutOfRange(format!("{count} eigenvalues requested from {n} cells")));
    }
    let spectrum = if n <= FD_DENSE_CUTOFF {
        solve_dense(&lap.to_dense(), false)?
    } else {
        solve_lanczos(&lap, count, &LanczosOptions::default())?
    };
    Ok(DirichletSpectrum {
        values: spectrum.eigenvalues[..count].to_vec(),
        method: DirichletMethod::FiniteDifference,
    })
}
