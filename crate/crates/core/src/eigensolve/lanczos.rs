//! Block Lanczos with full reorthogonalisation and thick restarts.
//!
//! The basis `V` is kept orthonormal to working precision by two passes of
//! classical Gram-Schmidt against every stored vector, and the projected
//! matrix `VᵀAV` is accumulated explicitly. A block of several start
//! vectors lets exactly degenerate eigenvalues (common on symmetric grids)
//! appear with their full multiplicity. Convergence is judged on true
//! residual norms, never on estimates.

use super::{SolverMetadata, Spectrum};
use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    /// Residual tolerance relative to `max(|β_1|, |β_K|)`.
    pub tol: f64,
    pub block_size: usize,
    /// Basis size that triggers a thick restart; `None` picks
    /// `max(3K, K + 150)`.
    pub max_subspace: Option<usize>,
    pub max_restarts: usize,
    pub seed: u64,
    pub want_vectors: bool,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        LanczosOptions {
            tol: 1e-9,
            block_size: 4,
            max_subspace: None,
            max_restarts: 50,
            seed: 0x5eed,
            want_vectors: false,
        }
    }
}

/// Fresh random vectors tried when a new direction collapses.
const BREAKDOWN_RETRIES: usize = 3;

struct Basis {
    v: Vec<Vec<f64>>,
    av: Vec<Vec<f64>>,
    /// Rows of `VᵀAV`.
    h: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl Basis {
    fn len(&self) -> usize {
        self.v.len()
    }

    /// Two Gram-Schmidt passes against the basis and `extra`; returns the
    /// surviving fraction of the norm.
    fn orthogonalise(&self, extra: &[Vec<f64>], w: &mut [f64]) -> f64 {
        let before = norm(w);
        if before == 0.0 {
            return 0.0;
        }
        for _ in 0..2 {
            let coeffs: Vec<f64> =
                self.v.par_iter().chain(extra.par_iter()).map(|q| dot(q, w)).collect();
            for (q, c) in self.v.iter().chain(extra).zip(coeffs) {
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        norm(w) / before
    }

    fn push(&mut self, op: &dyn LinearOperator, block: Vec<Vec<f64>>) -> usize {
        let images: Vec<Vec<f64>> = block.par_iter().map(|q| op.apply_vec(q)).collect();
        for (q, aq) in block.into_iter().zip(images) {
            let coeffs: Vec<f64> = self.v.par_iter().map(|u| dot(u, &aq)).collect();
            for (row, c) in self.h.iter_mut().zip(&coeffs) {
                row.push(*c);
            }
            let mut row = coeffs;
            row.push(dot(&q, &aq));
            self.h.push(row);
            self.v.push(q);
            self.av.push(aq);
        }
        self.len()
    }

    fn projected(&self) -> DMatrix<f64> {
        let m = self.len();
        let h = DMatrix::from_fn(m, m, |i, j| self.h[i][j]);
        (&h + h.transpose()) * 0.5
    }

    /// `Σ_j y_j x_j` over the stored vectors.
    fn combine(vecs: &[Vec<f64>], y: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
        let n = vecs[0].len();
        let mut out = vec![0.0; n];
        for (x, c) in vecs.iter().zip(y) {
            for (o, xi) in out.iter_mut().zip(x) {
                *o += c * xi;
            }
        }
        out
    }
}

struct Ritz {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    residual_vectors: Vec<Vec<f64>>,
    residuals: Vec<f64>,
}

fn ritz(basis: &Basis, count: usize) -> Result<Ritz> {
    let m = basis.len();
    let eig = SymmetricEigen::try_new(basis.projected(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::NonConvergence("projected eigenproblem".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(count.min(m));
    let pairs: Vec<(f64, Vec<f64>, Vec<f64>)> = order
        .par_iter()
        .map(|&c| {
            let theta = eig.eigenvalues[c];
            let y = eig.eigenvectors.column(c);
            let u = Basis::combine(&basis.v, y.iter().copied());
            let au = Basis::combine(&basis.av, y.iter().copied());
            let r: Vec<f64> = au.iter().zip(&u).map(|(a, b)| a - theta * b).collect();
            (theta, u, r)
        })
        .collect();
    let mut out = Ritz { values: vec![], vectors: vec![], residual_vectors: vec![], residuals: vec![] };
    for (t, u, r) in pairs {
        out.values.push(t);
        out.residuals.push(norm(&r));
        out.vectors.push(u);
        out.residual_vectors.push(r);
    }
    Ok(out)
}

/// Lowest `k` eigenpairs of a symmetric operator.
pub fn solve_lanczos(op: &dyn LinearOperator, k: usize, opts: &LanczosOptions) -> Result<Spectrum> {
    let start = Instant::now();
    let n = op.dim();
    if k == 0 || k > n {
        return Err(Error::Precondition(format!("cannot compute {k} eigenpairs in dimension {n}")));
    }
    let p = opts.block_size.clamp(1, n);
    let max_sub = opts.max_subspace.unwrap_or((3 * k).max(k + 150)).max(k + 2 * p).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis = Basis { v: vec![], av: vec![], h: vec![] };
    let mut matvecs = 0;
    let mut restarts = 0;
    let mut breakdown_retries = 0;

    let mut pending: Vec<Vec<f64>> =
        (0..p).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
    loop {
        // orthonormalise the pending block into new basis vectors
        let mut block: Vec<Vec<f64>> = Vec::new();
        for mut w in pending.drain(..) {
            if basis.len() + block.len() >= n {
                break;
            }
            let mut kept = basis.orthogonalise(&block, &mut w);
            let mut tries = 0;
            while kept < 1e-8 {
                // breakdown: the Krylov space is invariant in this direction
                if tries == BREAKDOWN_RETRIES {
                    return Err(Error::Breakdown { restarts: breakdown_retries });
                }
                tries += 1;
                breakdown_retries += 1;
                w = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
                kept = basis.orthogonalise(&block, &mut w);
            }
            let nw = norm(&w);
            w.iter_mut().for_each(|x| *x /= nw);
            block.push(w);
        }
        let added = block.len();
        matvecs += added;
        let m = basis.push(op, block);

        if m >= (k + p).min(n) {
            let r = ritz(&basis, k)?;
            let scale = r.values.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(f64::MIN_POSITIVE);
            let converged = r.residuals.iter().all(|x| *x <= opts.tol * scale);
            if converged || m == n {
                if !converged {
                    let worst = r.residuals.iter().cloned().fold(0.0, f64::max);
                    if worst > 1e-6 * scale {
                        return Err(Error::NonConvergence(format!(
                            "full basis reached with residual {worst:.3e}"
                        )));
                    }
                }
                return Ok(Spectrum {
                    eigenvalues: r.values,
                    eigenvectors: opts.want_vectors.then_some(r.vectors),
                    metadata: SolverMetadata {
                        solver: "lanczos".into(),
                        residuals: r.residuals,
                        restarts,
                        matvecs,
                        runtime: start.elapsed(),
                        ..Default::default()
                    },
                });
            }
            if m + p > max_sub {
                restarts += 1;
                if restarts > opts.max_restarts {
                    return Err(Error::NonConvergence(format!(
                        "{} restarts without reaching tolerance {:.1e}",
                        opts.max_restarts, opts.tol
                    )));
                }
                // thick restart on the wanted Ritz vectors plus a margin
                let keep = ritz(&basis, (k + p).min(m))?;
                let mut next = Basis { v: vec![], av: vec![], h: vec![] };
                for (i, (u, t)) in keep.vectors.iter().zip(&keep.values).enumerate() {
                    let au: Vec<f64> =
                        keep.residual_vectors[i].iter().zip(u).map(|(r, x)| r + t * x).collect();
                    for row in next.h.iter_mut() {
                        row.push(0.0);
                    }
                    let mut row = vec![0.0; i];
                    row.push(*t);
                    next.h.push(row);
                    next.v.push(u.clone());
                    next.av.push(au);
                }
                let mut unconverged: Vec<usize> =
                    (0..keep.values.len()).filter(|&i| keep.residuals[i] > opts.tol * scale).collect();
                unconverged.truncate(p);
                pending = unconverged.into_iter().map(|i| keep.residual_vectors[i].clone()).collect();
                basis = next;
                continue;
            }
        }
        pending = basis.av[m - added..].to_vec();
    }
}
