use super::{LinearOperator, OperatorHandle};
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;

pub const DEFAULT_DENSE_LIMIT: usize = 6000;

/// An assembled symmetric matrix together with the asymmetry measured
/// before symmetrisation.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    pub matrix: DMatrix<f64>,
    /// `‖A − Aᵀ‖_F / ‖A‖_F` of the raw columns.
    pub asymmetry: f64,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<f64>) -> Self {
        let asymmetry = relative_asymmetry(&matrix);
        let sym = (&matrix + matrix.transpose()) * 0.5;
        DenseOperator { matrix: sym, asymmetry }
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    /// Adds `diag(values)`.
    pub fn add_diagonal(&mut self, values: &[f64]) {
        for (i, v) in values.iter().enumerate() {
            self.matrix[(i, i)] += v;
        }
    }
}

impl LinearOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.matrix.nrows();
        // column-major storage: accumulate column by column
        y.iter_mut().for_each(|v| *v = 0.0);
        let data = self.matrix.as_slice();
        for (j, xj) in x.iter().enumerate() {
            if *xj == 0.0 {
                continue;
            }
            let col = &data[j * n..(j + 1) * n];
            for (yi, a) in y.iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
    }
}

fn relative_asymmetry(a: &DMatrix<f64>) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (a - a.transpose()).norm() / norm
}

/// Columns are the operator applied to unit cell vectors, two at a time.
pub(super) fn assemble(op: &OperatorHandle, limit: usize) -> Result<DenseOperator> {
    let n = op.dim();
    if n > limit {
        return Err(Error::DenseLimit { size: n, limit });
    }
    let free = op.free_part();
    let pairs: Vec<(usize, Option<usize>)> = (0..n)
        .step_by(2)
        .map(|j| (j, if j + 1 < n { Some(j + 1) } else { None }))
        .collect();
    let columns: Vec<(usize, Vec<f64>)> = pairs
        .par_iter()
        .flat_map_iter(|&(j, k)| {
            let mut e1 = vec![0.0; n];
            e1[j] = 1.0;
            match k {
                Some(k) => {
                    let mut e2 = vec![0.0; n];
                    e2[k] = 1.0;
                    let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
                    free.apply_pair(&e1, &e2, &mut y1, &mut y2);
                    vec![(j, y1), (k, y2)]
                }
                None => vec![(j, free.apply_vec(&e1))],
            }
        })
        .collect();
    let mut raw = DMatrix::zeros(n, n);
    for (j, col) in columns {
        raw.column_mut(j).copy_from_slice(&col);
    }
    let mut dense = DenseOperator::from_matrix(raw);
    if let Some(p) = &op.potential {
        dense.add_diagonal(&p.values);
    }
    Ok(dense)
}

const MAGIC: &[u8; 4] = b"SPBD";

/// Writes `SPBD`, `u32` size, then the entries row-major as little-endian
/// `f64`.
pub fn write_spbd(path: &Path, matrix: &DMatrix<f64>) -> Result<()> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: matrix.ncols() });
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(n as u32).to_le_bytes())?;
    for i in 0..n {
        for j in 0..n {
            out.write_all(&matrix[(i, j)].to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_spbd(path: &Path) -> Result<DMatrix<f64>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(Error::Config(format!("{}: not an SPBD file", path.display())));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    if bytes.len() != 8 + 8 * n * n {
        return Err(Error::Config(format!("{}: truncated SPBD file", path.display())));
    }
    let mut m = DMatrix::zeros(n, n);
    for (k, chunk) in bytes[8..].chunks_exact(8).enumerate() {
        m[(k / n, k % n)] = f64::from_le_bytes(chunk.try_into().unwrap());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{DomainSpec, Shape};
    use crate::operator::PotentialSpec;
    use rand::{Rng, SeedableRng};
    use std::sync::Arc;

    fn interval16() -> Arc<DomainSpec> {
        Arc::new(DomainSpec::build(Shape::Interval { a: -1.0, b: 1.0 }, 16, 4.0).unwrap())
    }

    #[test]
    fn dense_matches_matrix_free() {
        let op = OperatorHandle::fourier(interval16(), 0.0).unwrap();
        let dense = op.assemble_dense(DEFAULT_DENSE_LIMIT).unwrap();
        assert!(dense.asymmetry < 1e-12);
        let n = op.dim();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let a = op.apply_vec(&x);
            let b = dense.apply_vec(&x);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_potential_shifts_spectrum() {
        let dom = interval16();
        let op = OperatorHandle::fourier(dom.clone(), 0.0).unwrap();
        let base = op.assemble_dense(100).unwrap();
        let pot = Arc::new(PotentialSpec::new(&dom, vec![0.75; dom.interior_count()], 3.0));
        let shifted = op.with_potential(pot).unwrap().assemble_dense(100).unwrap();
        let e0 = base.matrix.clone().symmetric_eigenvalues();
        let e1 = shifted.matrix.clone().symmetric_eigenvalues();
        let mut e0: Vec<f64> = e0.iter().copied().collect();
        let mut e1: Vec<f64> = e1.iter().copied().collect();
        e0.sort_by(f64::total_cmp);
        e1.sort_by(f64::total_cmp);
        for (a, b) in e0.iter().zip(&e1) {
            assert!((b - a - 0.75).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_enforced() {
        let op = OperatorHandle::fourier(interval16(), 0.0).unwrap();
        assert!(matches!(op.assemble_dense(8), Err(Error::DenseLimit { .. })));
    }

    #[test]
    fn spbd_round_trip() {
        let m = DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64 + 0.5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.spbd");
        write_spbd(&path, &m).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"SPBD");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        // row-major: second stored value is entry (0, 1)
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 1.5);
        assert_eq!(read_spbd(&path).unwrap(), m);
    }
}
