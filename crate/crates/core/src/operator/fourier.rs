//! Matrix-free application of `χ_Ω F⁻¹ √(|ξ|² + m²) F χ_Ω` on the padded
//! periodic box.

use crate::geometry::DomainSpec;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Samples of `√(|ξ|² + m²)` on the discrete frequency grid of the box.
#[derive(Debug, Clone)]
pub struct SymbolMultiplier {
    pub mass: f64,
    /// Frequencies per axis in FFT order, `ξ = 2πk/L` with `|k| ≤ M/2`.
    pub frequencies: Vec<f64>,
    /// Multiplier on the full frequency grid, row-major.
    pub values: Vec<f64>,
    pub dimension: usize,
}

impl SymbolMultiplier {
    pub fn new(box_points: usize, box_length: f64, dimension: usize, mass: f64) -> Self {
        let frequencies: Vec<f64> = (0..box_points)
            .map(|i| {
                // The Nyquist index gets +π/h so the grid is symmetric in |ξ|.
                let k = if i <= box_points / 2 {
                    i as f64
                } else {
                    i as f64 - box_points as f64
                };
                2.0 * PI * k / box_length
            })
            .collect();
        let values = match dimension {
            1 => frequencies.iter().map(|x| x.hypot(mass)).collect(),
            2 => {
                let mut v = Vec::with_capacity(box_points * box_points);
                for x in &frequencies {
                    for y in &frequencies {
                        v.push((x * x + y * y + mass * mass).sqrt());
                    }
                }
                v
            }
            _ => panic!("unsupported dimension {dimension}"),
        };
        SymbolMultiplier { mass, frequencies, values, dimension }
    }

    /// Same grid with every value replaced by `value`.
    pub fn constant(box_points: usize, box_length: f64, dimension: usize, value: f64) -> Self {
        let mut s = Self::new(box_points, box_length, dimension, 0.0);
        s.values.iter_mut().for_each(|v| *v = value);
        s.mass = value;
        s
    }
}

/// FFT plans for one box size. Plans are shared; scratch is per call.
#[derive(Clone)]
pub(crate) struct BoxFft {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    points: usize,
    dimension: usize,
}

impl std::fmt::Debug for BoxFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BoxFft({}^{})", self.points, self.dimension)
    }
}

impl BoxFft {
    pub(crate) fn new(points: usize, dimension: usize) -> Self {
        let mut planner = FftPlanner::new();
        BoxFft {
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
            points,
            dimension,
        }
    }

    /// In-place `buf ← F⁻¹ (symbol · F buf)`.
    pub(crate) fn convolve(&self, buf: &mut [Complex64], symbol: &[f64]) {
        let m = self.points;
        let mut scratch =
            vec![Complex64::default(); self.forward.get_inplace_scratch_len().max(self.inverse.get_inplace_scratch_len())];
        match self.dimension {
            1 => {
                self.forward.process_with_scratch(buf, &mut scratch);
                for (b, s) in buf.iter_mut().zip(symbol) {
                    *b *= *s;
                }
                self.inverse.process_with_scratch(buf, &mut scratch);
                let scale = 1.0 / m as f64;
                buf.iter_mut().for_each(|b| *b *= scale);
            }
            2 => {
                let mut tmp = vec![Complex64::default(); m * m];
                self.forward.process_with_scratch(buf, &mut scratch);
                transpose(buf, &mut tmp, m);
                self.forward.process_with_scratch(&mut tmp, &mut scratch);
                // |ξ| is symmetric under swapping the axes, so the
                // transposed layout uses the same table.
                for (b, s) in tmp.iter_mut().zip(symbol) {
                    *b *= *s;
                }
                self.inverse.process_with_scratch(&mut tmp, &mut scratch);
                transpose(&tmp, buf, m);
                self.inverse.process_with_scratch(buf, &mut scratch);
                let scale = 1.0 / (m * m) as f64;
                buf.iter_mut().for_each(|b| *b *= scale);
            }
            d => panic!("unsupported dimension {d}"),
        }
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], m: usize) {
    const BLOCK: usize = 32;
    for ib in (0..m).step_by(BLOCK) {
        for jb in (0..m).step_by(BLOCK) {
            for i in ib..(ib + BLOCK).min(m) {
                for j in jb..(jb + BLOCK).min(m) {
                    dst[j * m + i] = src[i * m + j];
                }
            }
        }
    }
}

/// Apply the restricted multiplier to two real interior vectors at once,
/// carried as the real and imaginary parts of one complex field.
pub(crate) fn apply_pair(
    domain: &DomainSpec,
    fft: &BoxFft,
    symbol: &[f64],
    x_re: &[f64],
    x_im: Option<&[f64]>,
    y_re: &mut [f64],
    y_im: Option<&mut [f64]>,
) {
    let total = domain.mask.len();
    let mut buf = vec![Complex64::default(); total];
    match x_im {
        Some(im) => {
            for ((&cell, &r), &i) in domain.interior.iter().zip(x_re).zip(im) {
                buf[cell] = Complex64::new(r, i);
            }
        }
        None => {
            for (&cell, &r) in domain.interior.iter().zip(x_re) {
                buf[cell] = Complex64::new(r, 0.0);
            }
        }
    }
    fft.convolve(&mut buf, symbol);
    for (&cell, y) in domain.interior.iter().zip(y_re.iter_mut()) {
        *y = buf[cell].re;
    }
    if let Some(y_im) = y_im {
        for (&cell, y) in domain.interior.iter().zip(y_im.iter_mut()) {
            *y = buf[cell].im;
        }
    }
}
