//! Commutator trace inequalities evaluated on assembled matrices.
//!
//! For any real symmetric `H` with orthonormal eigenpairs `(β_j, u_j)` and
//! a diagonal `X`, the sums
//!
//! ```text
//! R1(z) = Σ_{β_j ≤ z} (z−β_j)⟨u_j,[X,[H,X]]u_j⟩ − 2‖[H,X]u_j‖²
//! R2(z) = Σ_{β_j ≤ z} (z−β_j)²⟨u_j,[X,[H,X]]u_j⟩ − 2(z−β_j)‖[H,X]u_j‖²
//! ```
//!
//! are nonpositive exactly, so these checks see round-off only.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceSums {
    pub r1: f64,
    pub r2: f64,
    /// `n · β_max²`, the magnitude tolerances are scaled by.
    pub scale: f64,
    /// Number of eigenpairs with `β_j ≤ z`.
    pub terms: usize,
}

/// `[H,X]` for diagonal `X = diag(x)`: entries `H_ij (x_j − x_i)`.
pub fn commutator(h: &DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)] * (x[j] - x[i]))
}

/// `[X,[H,X]]` for diagonal `X`: entries `−H_ij (x_i − x_j)²`.
pub fn double_commutator(h: &DMatrix<f64>, x: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(h.nrows(), h.ncols(), |i, j| -h[(i, j)] * (x[i] - x[j]).powi(2))
}

fn check_shapes(h: &DMatrix<f64>, values: &[f64], vectors: &[Vec<f64>]) -> Result<()> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: h.ncols() });
    }
    if vectors.len() != values.len() {
        return Err(Error::Precondition("eigenvectors are required for trace checks".into()));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    Ok(())
}

/// Both trace sums at `z` with `X = diag(x)`.
///
/// `values` must be sorted ascending with matching unit `vectors`; the sums
/// only involve pairs with `β_j ≤ z`, but the inequalities rely on the
/// full eigenbasis, so pass every pair.
pub fn trace_inequality_check(
    h: &DMatrix<f64>,
    values: &[f64],
    vectors: &[Vec<f64>],
    x: &[f64],
    z: f64,
) -> Result<TraceSums> {
    check_shapes(h, values, vectors)?;
    if x.len() != h.nrows() {
        return Err(Error::DimensionMismatch { expected: h.nrows(), got: x.len() });
    }
    let c = commutator(h, x);
    let dd = double_commutator(h, x);
    let (mut r1, mut r2, mut terms) = (0.0, 0.0, 0);
    for (b, u) in values.iter().zip(vectors) {
        if *b > z {
            continue;
        }
        terms += 1;
        let u = DVector::from_column_slice(u);
        let curv = u.dot(&(&dd * &u));
        let grad = (&c * &u).norm_squared();
        let w = z - b;
        r1 += w * curv - 2.0 * grad;
        r2 += w * w * curv - 2.0 * w * grad;
    }
    let bmax = values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    Ok(TraceSums { r1, r2, scale: h.nrows() as f64 * bmax * bmax, terms })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UvsR1 {
    /// `(d−1) Σ (z−β_j)² ⟨u_j, H₀^{−1} u_j⟩ − 2 Σ (z−β_j)` with the true
    /// inverse of the free matrix.
    pub value: f64,
    /// Same expression with `⟨u_j, H₀^{−1} u_j⟩` replaced by `1/β_j`,
    /// i.e. `(d+1) Σ (z−β_j)²/β_j − 2z Σ (z−β_j)/β_j`.
    pub reduced: f64,
    /// Sum of the positive parts of both sides, a natural magnitude.
    pub scale: f64,
}

/// Evaluates the `U`-versus-`R_1` inequality at `z` for eigenpairs of
/// `H₀ + V`, using the free matrix `free` for the inverse.
///
/// Without a potential the two expressions agree identically.
pub fn uvsr1_check(free: &DMatrix<f64>, values: &[f64], vectors: &[Vec<f64>], d: usize, z: f64) -> Result<UvsR1> {
    check_shapes(free, values, vectors)?;
    let chol = free
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Precondition("free operator matrix is not positive definite".into()))?;
    let df = d as f64;
    let (mut quad, mut lin, mut red_quad, mut red_lin) = (0.0, 0.0, 0.0, 0.0);
    for (b, u) in values.iter().zip(vectors) {
        if *b > z {
            continue;
        }
        if *b <= 0.0 {
            return Err(Error::Precondition(format!("nonpositive eigenvalue {b}")));
        }
        let u = DVector::from_column_slice(u);
        let inv = u.dot(&chol.solve(&u));
        let w = z - b;
        quad += w * w * inv;
        lin += w;
        red_quad += w * w / b;
        red_lin += w / b;
    }
    Ok(UvsR1 {
        value: (df - 1.0) * quad - 2.0 * lin,
        reduced: (df + 1.0) * red_quad - 2.0 * z * red_lin,
        scale: (df - 1.0) * quad + 2.0 * lin,
    })
}
