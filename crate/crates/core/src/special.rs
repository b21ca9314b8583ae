//! Special functions used across the crate: Gamma, integer-order Bessel
//! functions and their zeros, the sine/cosine integrals, and Gauss-Legendre
//! nodes.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Bessel function of the first kind `J_n(x)` for integer order.
///
/// Evaluated from Bessel's integral `J_n(x) = (1/2π) ∫ cos(nτ − x sin τ) dτ`
/// over a full period with the trapezoid rule, which converges
/// geometrically once the node count exceeds `x + n` by a margin.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let nf = n as f64;
    let points = 2 * ((x.abs() + nf).ceil() as usize) + 64;
    let step = 2.0 * PI / points as f64;
    let mut sum = 0.0;
    for i in 0..points {
        let tau = i as f64 * step;
        sum += (nf * tau - x * tau.sin()).cos();
    }
    sum / points as f64
}

/// Positive zeros of `J_n` below `x_max`, ascending.
pub fn bessel_zeros(n: u32, x_max: f64) -> Vec<f64> {
    let mut zeros = Vec::new();
    // j_{n,1} > n, and consecutive zeros are separated by more than π/2.
    let step = 0.05;
    let mut a = (n as f64).max(step);
    let mut fa = bessel_j(n, a);
    while a < x_max {
        let b = (a + step).min(x_max);
        let fb = bessel_j(n, b);
        if fa == 0.0 {
            zeros.push(a);
        } else if fa * fb < 0.0 {
            zeros.push(bisect(|x| bessel_j(n, x), a, b));
        }
        a = b;
        fa = fb;
        if b >= x_max {
            break;
        }
    }
    zeros
}

/// Root of a continuous function with a sign change on `[a, b]`.
pub fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Sine and cosine integrals `(Si(x), Ci(x))`.
///
/// Power series for `|x| ≤ 2`, otherwise the continued fraction for
/// `E_1(ix)` evaluated with the modified Lentz method.
pub fn si_ci(x: f64) -> (f64, f64) {
    const MAXIT: usize = 200;
    const FPMIN: f64 = 1e-300;
    let eps = f64::EPSILON;
    let t = x.abs();
    if t == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let (mut si, ci);
    if t > 2.0 {
        let mut b = Complex64::new(1.0, t);
        let mut c = Complex64::new(1.0 / FPMIN, 0.0);
        let mut d = Complex64::new(1.0, 0.0) / b;
        let mut h = d;
        for i in 2..MAXIT {
            let a = -(((i - 1) * (i - 1)) as f64);
            b += Complex64::new(2.0, 0.0);
            d = Complex64::new(1.0, 0.0) / (d * a + b);
            c = b + Complex64::new(a, 0.0) / c;
            let del = c * d;
            h *= del;
            if (del.re - 1.0).abs() + del.im.abs() < eps {
                break;
            }
        }
        h *= Complex64::new(t.cos(), -t.sin());
        ci = -h.re;
        si = FRAC_PI_2 + h.im;
    } else {
        let (mut sum, mut sums, mut sumc) = (0.0, 0.0, 0.0);
        let mut sign = 1.0;
        let mut fact = 1.0;
        let mut odd = true;
        for k in 1..MAXIT {
            fact *= t / k as f64;
            let term = fact / k as f64;
            sum += sign * term;
            let err = term / sum.abs();
            if odd {
                sign = -sign;
                sums = sum;
                sum = sumc;
            } else {
                sumc = sum;
                sum = sums;
            }
            if err < eps {
                break;
            }
            odd = !odd;
        }
        si = sums;
        ci = sumc + t.ln() + EULER_GAMMA;
    }
    if x < 0.0 {
        si = -si;
    }
    (si, ci)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let z_new = z - p0 / dp;
            let done = (z_new - z).abs() < 1e-15;
            z = z_new;
            if done {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
