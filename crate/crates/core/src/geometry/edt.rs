//! Exact squared Euclidean distance transform on a regular grid.
//!
//! Separable lower-envelope-of-parabolas construction: one linear pass per
//! axis. Distances are in cell units.

/// Squared distance from every cell to the nearest cell where `feature` is
/// true. `shape` lists the extent per axis, row-major with axis 0 slowest.
pub fn squared_distance_to(feature: &[bool], shape: &[usize]) -> Vec<f64> {
    let total: usize = shape.iter().product();
    assert_eq!(feature.len(), total);
    let mut grid: Vec<f64> = feature
        .iter()
        .map(|&f| if f { 0.0 } else { f64::INFINITY })
        .collect();

    let mut line = Vec::new();
    let mut out = Vec::new();
    for axis in 0..shape.len() {
        let len = shape[axis];
        let stride: usize = shape[axis + 1..].iter().product();
        let outer = total / (len * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * len * stride + inner;
                line.clear();
                line.extend((0..len).map(|i| grid[base + i * stride]));
                transform_1d(&line, &mut out);
                for (i, v) in out.iter().enumerate() {
                    grid[base + i * stride] = *v;
                }
            }
        }
    }
    grid
}

/// One-dimensional pass: `out[q] = min_p (q − p)² + f[p]`.
fn transform_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    // vertices of the lower envelope and the boundaries between them
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k: usize = 0;
    let mut started = false;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        if !started {
            v[0] = q;
            z[0] = f64::NEG_INFINITY;
            z[1] = f64::INFINITY;
            started = true;
            continue;
        }
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates everywhere
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    if !started {
        return;
    }
    let mut j = 0;
    for (q, slot) in out.iter_mut().enumerate() {
        while z[j + 1] < q as f64 {
            j += 1;
        }
        let p = v[j];
        let dq = q as f64 - p as f64;
        *slot = dq * dq + f[p];
    }
}
