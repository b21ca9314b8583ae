//! Lowest eigenpairs of symmetric operators: a dense oracle and a
//! matrix-free block Lanczos path, cross-checked against each other.

mod dense;
mod lanczos;
mod refine;

pub use dense::solve_dense;
pub use lanczos::{solve_lanczos, LanczosOptions};
pub use refine::{spectrum_refinement_study, RefinementLevel, RefinementPlan, RefinementStudy};

use crate::error::{Error, Result};
use crate::operator::{LinearOperator, OperatorHandle};
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::time::Duration;

/// Eigenvalues closer than this multiple of `|β_K|` form a multiplet.
pub const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Default)]
pub struct SolverMetadata {
    /// Operator realisation, e.g. `fourier_grid`.
    pub method: String,
    /// `dense` or `lanczos`.
    pub solver: String,
    pub grid: Option<usize>,
    pub padding: Option<f64>,
    pub mass: f64,
    /// `‖A u_k − β_k u_k‖` per returned pair.
    pub residuals: Vec<f64>,
    pub restarts: usize,
    pub matvecs: usize,
    /// Wall time; never serialized so outputs stay reproducible.
    pub runtime: Duration,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors on the interior cells, when requested.
    pub eigenvectors: Option<Vec<Vec<f64>>>,
    pub metadata: SolverMetadata,
}

/// The on-disk form of a [`Spectrum`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectrumJson {
    pub schema: u32,
    pub method: String,
    pub solver: String,
    pub grid: Option<usize>,
    pub padding: Option<f64>,
    pub m: f64,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Keeps the lowest `k` pairs.
    pub fn truncate(&mut self, k: usize) {
        self.eigenvalues.truncate(k);
        if let Some(v) = &mut self.eigenvectors {
            v.truncate(k);
        }
        self.metadata.residuals.truncate(k);
    }

    /// Index ranges of eigenvalues equal up to [`TIE_TOLERANCE`].
    pub fn multiplets(&self) -> Vec<Range<usize>> {
        let Some(&top) = self.eigenvalues.last() else {
            return Vec::new();
        };
        let tol = TIE_TOLERANCE * top.abs().max(self.eigenvalues[0].abs());
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.eigenvalues.len() {
            if i == self.eigenvalues.len() || self.eigenvalues[i] - self.eigenvalues[i - 1] > tol {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Largest `‖A u_k − β_k u_k‖ / |β_K|` and largest Gram defect
    /// `|⟨u_i, u_j⟩ − δ_ij|`; `None` without eigenvectors.
    pub fn certify(&self, op: &dyn LinearOperator) -> Option<(f64, f64)> {
        let vecs = self.eigenvectors.as_ref()?;
        let scale = self.eigenvalues.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let mut res = 0.0f64;
        for (u, b) in vecs.iter().zip(&self.eigenvalues) {
            let au = op.apply_vec(u);
            let r = au.iter().zip(u).map(|(x, y)| (x - b * y).powi(2)).sum::<f64>().sqrt();
            res = res.max(r / scale);
        }
        let mut gram = 0.0f64;
        for i in 0..vecs.len() {
            for j in 0..=i {
                let g: f64 = vecs[i].iter().zip(&vecs[j]).map(|(a, b)| a * b).sum();
                gram = gram.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        Some((res, gram))
    }

    pub fn to_json(&self) -> SpectrumJson {
        SpectrumJson {
            schema: 1,
            method: self.metadata.method.clone(),
            solver: self.metadata.solver.clone(),
            grid: self.metadata.grid,
            padding: self.metadata.padding,
            m: self.metadata.mass,
            eigenvalues: self.eigenvalues.clone(),
            residuals: self.metadata.residuals.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SolverChoice {
    /// Dense when the cell count is at most [`AUTO_DENSE_MAX`].
    #[default]
    Auto,
    Dense,
    Lanczos,
}

pub const AUTO_DENSE_MAX: usize = 1200;

/// Lowest `k` eigenvalues of a grid operator, with metadata filled in.
pub fn solve_operator(
    op: &OperatorHandle,
    k: usize,
    choice: SolverChoice,
    dense_limit: usize,
    opts: &LanczosOptions,
) -> Result<Spectrum> {
    let n = op.domain.interior_count();
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("{k} eigenvalues requested from {n} cells")));
    }
    let dense = match choice {
        SolverChoice::Auto => n <= AUTO_DENSE_MAX.min(dense_limit),
        SolverChoice::Dense => true,
        SolverChoice::Lanczos => false,
    };
    let mut spec = if dense {
        let start = std::time::Instant::now();
        let m = op.assemble_dense(dense_limit)?;
        let mut s = solve_dense(&m.matrix, opts.want_vectors)?;
        s.truncate(k);
        s.metadata.runtime = start.elapsed();
        s
    } else {
        solve_lanczos(op, k, opts)?
    };
    spec.metadata.method = op.method.as_str().to_string();
    spec.metadata.grid = Some(op.domain.resolution);
    spec.metadata.padding = Some(op.domain.padding);
    spec.metadata.mass = op.mass;
    Ok(spec)
}
