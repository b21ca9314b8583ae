use super::{solve_operator, LanczosOptions, SolverChoice};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Shape};
use crate::operator::{OperatorHandle, DEFAULT_DENSE_LIMIT};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct RefinementLevel {
    pub resolution: usize,
    pub padding: f64,
    pub cells: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RefinementStudy {
    pub levels: Vec<RefinementLevel>,
    /// `|β_k(level l+1) − β_k(level l)|`, one row per consecutive pair.
    pub cauchy: Vec<Vec<f64>>,
    /// Indices (0-based) whose last change exceeds `slack · β_k`.
    pub unsettled: Vec<usize>,
    /// Indices `k < K/2` whose changes did not shrink monotonically.
    pub non_monotone: Vec<usize>,
    pub slack: f64,
}

#[derive(Debug, Clone)]
pub struct RefinementPlan {
    pub shape: Shape,
    pub base_resolution: usize,
    pub base_padding: f64,
    pub mass: f64,
    pub count: usize,
    pub levels: usize,
    pub double_padding: bool,
    pub slack: f64,
}

/// Recomputes the lowest values with the resolution doubled per level, and
/// the padding doubled too when `double_padding` is set.
pub fn spectrum_refinement_study(plan: &RefinementPlan) -> Result<RefinementStudy> {
    let RefinementPlan {
        ref shape,
        base_resolution,
        base_padding,
        mass,
        count: k,
        levels,
        double_padding,
        slack,
    } = *plan;
    if levels < 2 {
        return Err(Error::OutOfRange("a refinement study needs at least two levels".into()));
    }
    let mut out = Vec::with_capacity(levels);
    for l in 0..levels {
        let resolution = base_resolution << l;
        let padding = if double_padding { base_padding * (1 << l) as f64 } else { base_padding };
        let domain = Arc::new(DomainSpec::build(shape.clone(), resolution, padding)?);
        let cells = domain.interior_count();
        let op = OperatorHandle::fourier(domain, mass)?;
        let spec = solve_operator(
            &op,
            k.min(cells),
            SolverChoice::Auto,
            DEFAULT_DENSE_LIMIT,
            &LanczosOptions::default(),
        )?;
        out.push(RefinementLevel { resolution, padding, cells, eigenvalues: spec.eigenvalues });
    }
    let kk = out.iter().map(|l| l.eigenvalues.len()).min().unwrap_or(0);
    let cauchy: Vec<Vec<f64>> = out
        .windows(2)
        .map(|w| (0..kk).map(|i| (w[1].eigenvalues[i] - w[0].eigenvalues[i]).abs()).collect())
        .collect();
    let last = out.last().unwrap();
    let unsettled = (0..kk)
        .filter(|&i| cauchy.last().unwrap()[i] > slack * last.eigenvalues[i].abs())
        .collect();
    let non_monotone = (0..kk.div_ceil(2).min(kk))
        .filter(|&i| cauchy.windows(2).any(|w| w[1][i] > w[0][i]))
        .collect();
    Ok(RefinementStudy { levels: out, cauchy, unsettled, non_monotone, slack })
}
