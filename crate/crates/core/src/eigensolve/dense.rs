use super::{SolverMetadata, Spectrum};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::time::Instant;

const MAX_SWEEPS: usize = 10_000;

/// All eigenpairs of a symmetric matrix, ascending.
///
/// Householder tridiagonalisation followed by implicit-shift QR. Inputs
/// whose relative asymmetry exceeds `1e-10` are rejected.
pub fn solve_dense(matrix: &DMatrix<f64>, want_vectors: bool) -> Result<Spectrum> {
    let start = Instant::now();
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: matrix.ncols() });
    }
    if n == 0 {
        return Err(Error::Precondition("empty matrix".into()));
    }
    let norm = matrix.norm();
    if norm > 0.0 && (matrix - matrix.transpose()).norm() > 1e-10 * norm {
        return Err(Error::Precondition("matrix is not symmetric".into()));
    }
    let eig = SymmetricEigen::try_new(matrix.clone(), f64::EPSILON, MAX_SWEEPS).ok_or_else(|| {
        Error::NonConvergence(format!("dense QR iteration exceeded {MAX_SWEEPS} sweeps"))
    })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();

    let (eigenvectors, residuals) = if want_vectors {
        let vecs: Vec<Vec<f64>> =
            order.iter().map(|&i| eig.eigenvectors.column(i).iter().copied().collect()).collect();
        let u = DMatrix::from_fn(n, n, |r, c| vecs[c][r]);
        let au = matrix * &u;
        let residuals = (0..n)
            .map(|c| (au.column(c) - u.column(c) * eigenvalues[c]).norm())
            .collect();
        (Some(vecs), residuals)
    } else {
        (None, Vec::new())
    };
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        metadata: SolverMetadata {
            solver: "dense".into(),
            residuals,
            runtime: start.elapsed(),
            ..Default::default()
        },
    })
}
