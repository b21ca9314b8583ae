//! Discrete self-adjoint approximations of the Klein-Gordon operator on a
//! domain, plus the comparison operators used by the checks.

mod dense;
pub mod dirichlet;
pub mod fourier;
pub mod galerkin;
pub mod kernel;
pub mod potential;

pub use dense::{read_spbd, write_spbd, DenseOperator, DEFAULT_DENSE_LIMIT};
pub use dirichlet::{dirichlet_laplacian_spectrum, DirichletSpectrum};
pub use fourier::SymbolMultiplier;
pub use galerkin::{sine_galerkin_1d, GalerkinAssembly, GalerkinMatrix};
pub use kernel::{free_density_p0, semiclassical_constant};
pub use potential::PotentialSpec;

use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use fourier::BoxFft;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A real symmetric linear map on `R^n`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim()];
        self.apply(x, &mut y);
        y
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FourierGrid,
    SineGalerkin1d,
    DirichletLaplacianReference,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::FourierGrid => "fourier_grid",
            Method::SineGalerkin1d => "sine_galerkin_1d",
            Method::DirichletLaplacianReference => "dirichlet_laplacian_reference",
        }
    }
}

/// The grid realisation of `H_{m,Ω}` (+ optional potential) on the interior
/// cells of a domain.
#[derive(Debug, Clone)]
pub struct OperatorHandle {
    pub domain: Arc<DomainSpec>,
    pub mass: f64,
    pub method: Method,
    pub symbol: Arc<SymbolMultiplier>,
    pub potential: Option<Arc<PotentialSpec>>,
    fft: BoxFft,
}

impl OperatorHandle {
    pub fn fourier(domain: Arc<DomainSpec>, mass: f64) -> Result<Self> {
        if !(mass >= 0.0) {
            return Err(Error::OutOfRange(format!("mass {mass} must be nonnegative")));
        }
        let d = domain.dimension();
        let symbol = SymbolMultiplier::new(domain.box_points, domain.box_length(), d, mass);
        Ok(Self::with_symbol(domain, symbol))
    }

    /// Operator with an arbitrary multiplier table on the box grid.
    pub fn with_symbol(domain: Arc<DomainSpec>, symbol: SymbolMultiplier) -> Self {
        let fft = BoxFft::new(domain.box_points, domain.dimension());
        OperatorHandle {
            mass: symbol.mass,
            domain,
            method: Method::FourierGrid,
            symbol: Arc::new(symbol),
            potential: None,
            fft,
        }
    }

    pub fn with_potential(mut self, potential: Arc<PotentialSpec>) -> Result<Self> {
        if potential.values.len() != self.domain.interior_count() {
            return Err(Error::DimensionMismatch {
                expected: self.domain.interior_count(),
                got: potential.values.len(),
            });
        }
        self.potential = Some(potential);
        Ok(self)
    }

    /// The same operator without the potential term.
    pub fn free_part(&self) -> Self {
        let mut op = self.clone();
        op.potential = None;
        op
    }

    /// Checked application to one vector on the interior cells.
    pub fn apply_checked(&self, x: &[f64]) -> Result<Vec<f64>> {
        let n = self.domain.interior_count();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: x.len() });
        }
        Ok(self.apply_vec(x))
    }

    /// Application to two vectors with a single complex FFT round trip.
    pub fn apply_pair(&self, x1: &[f64], x2: &[f64], y1: &mut [f64], y2: &mut [f64]) {
        fourier::apply_pair(
            &self.domain,
            &self.fft,
            &self.symbol.values,
            x1,
            Some(x2),
            y1,
            Some(&mut *y2),
        );
        if let Some(p) = &self.potential {
            for (i, v) in p.values.iter().enumerate() {
                y1[i] += v * x1[i];
                y2[i] += v * x2[i];
            }
        }
    }

    pub fn assemble_dense(&self, limit: usize) -> Result<DenseOperator> {
        dense::assemble(self, limit)
    }
}

impl LinearOperator for OperatorHandle {
    fn dim(&self) -> usize {
        self.domain.interior_count()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        fourier::apply_pair(&self.domain, &self.fft, &self.symbol.values, x, None, y, None);
        if let Some(p) = &self.potential {
            for ((yi, xi), v) in y.iter_mut().zip(x).zip(&p.values) {
                *yi += v * xi;
            }
        }
    }
}

/// `diag(values)` as an operator.
#[derive(Debug, Clone)]
pub struct Diagonal(pub Vec<f64>);

impl LinearOperator for Diagonal {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = d * xi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::PI;

    fn full_box(dim: usize, m: usize, h: f64) -> Arc<DomainSpec> {
        // every cell but the outer layer; the plane-wave test below uses the
        // unrestricted symbol instead
        let mut mask = vec![true; m.pow(dim as u32)];
        for (i, slot) in mask.iter_mut().enumerate() {
            let mut r = i;
            for _ in 0..dim {
                let c = r % m;
                r /= m;
                if c == 0 || c == m - 1 {
                    *slot = false;
                }
            }
        }
        Arc::new(DomainSpec::from_box_mask(dim, m, h, mask).unwrap())
    }

    #[test]
    fn plane_wave_is_an_eigenvector_of_the_box_symbol() {
        let m = 32;
        let h = 0.25;
        let l = m as f64 * h;
        let fft = BoxFft::new(m, 2);
        let sym = SymbolMultiplier::new(m, l, 2, 0.0);
        let (k0, k1) = (3usize, 4usize);
        let xi = (2.0 * PI / l) * 5.0;
        let mut buf: Vec<num_complex::Complex64> = (0..m * m)
            .map(|idx| {
                let (i, j) = (idx / m, idx % m);
                let phase = 2.0 * PI * ((k0 * i) as f64 + (k1 * j) as f64) / m as f64;
                num_complex::Complex64::new(phase.cos(), 0.0)
            })
            .collect();
        let input = buf.clone();
        fft.convolve(&mut buf, &sym.values);
        for (o, i) in buf.iter().zip(&input) {
            assert!((o - i * xi).norm() < 1e-10);
        }
        // m = 0 and ξ* = (3, 4) in units of 2π/L: multiplier 5
        assert!((sym.values[3 * m + 4] * l / (2.0 * PI) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_and_bounded_below_by_mass() {
        let dom = Arc::new(DomainSpec::build(Shape::Interval { a: -1.0, b: 1.0 }, 16, 4.0).unwrap());
        let op = OperatorHandle::fourier(dom.clone(), 0.5).unwrap();
        let n = op.dim();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let au = op.apply_vec(&u);
            let av = op.apply_vec(&v);
            let lhs: f64 = u.iter().zip(&av).map(|(a, b)| a * b).sum();
            let rhs: f64 = au.iter().zip(&v).map(|(a, b)| a * b).sum();
            let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((lhs - rhs).abs() <= 1e-10 * nu * nv);
            let q: f64 = u.iter().zip(&au).map(|(a, b)| a * b).sum();
            assert!(q >= 0.5 * nu * nu);
        }
        assert!(matches!(
            op.apply_checked(&[1.0; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pair_application_matches_single() {
        let dom = full_box(2, 16, 0.1);
        let op = OperatorHandle::fourier(dom, 1.0).unwrap();
        let n = op.dim();
        let x1: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x2: Vec<f64> = (0..n).map(|i| (i as f64 * 0.11).cos()).collect();
        let (mut y1, mut y2) = (vec![0.0; n], vec![0.0; n]);
        op.apply_pair(&x1, &x2, &mut y1, &mut y2);
        let z1 = op.apply_vec(&x1);
        let z2 = op.apply_vec(&x2);
        for i in 0..n {
            assert!((y1[i] - z1[i]).abs() < 1e-12);
            assert!((y2[i] - z2[i]).abs() < 1e-12);
        }
    }
}
