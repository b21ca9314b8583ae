//! Convergence table across grid refinements and, on intervals, against
//! the sine-Galerkin discretization.

use super::config::Scenario;
use super::{output_dir, write_json};
use crate::eigensolve::{solve_dense, solve_operator, spectrum_refinement_study, RefinementLevel, RefinementPlan};
use crate::error::Result;
use crate::geometry::{DomainSpec, Shape};
use crate::operator::{sine_galerkin_1d, GalerkinAssembly, OperatorHandle};
use serde::Serialize;
use std::io::Write;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub schema: u32,
    pub domain: String,
    pub m: f64,
    pub levels: Vec<RefinementLevel>,
    /// Lowest values of the Galerkin matrix (intervals only).
    pub galerkin: Option<Vec<f64>>,
    pub galerkin_basis: Option<usize>,
    /// `max_k |β_k(grid) − β_k(Galerkin)| / β_k(Galerkin)` at the finest level.
    pub max_relative_discrepancy: Option<f64>,
    /// `β_k(m) − β_k(0)` on the finest grid, when `m > 0`.
    pub mass_shift: Option<Vec<f64>>,
}

/// Runs the comparison and writes `compare.json` and `compare.csv`.
pub fn compare_methods(s: &Scenario) -> Result<ComparisonTable> {
    let shape = s.domain.shape(&s.base_dir)?;
    let m = s.operator.mass;
    let plan = RefinementPlan {
        shape: shape.clone(),
        base_resolution: s.domain.resolution,
        base_padding: s.domain.padding,
        mass: m,
        count: s.solver.count,
        levels: s.solver.levels,
        double_padding: s.solver.double_padding,
        slack: s.checks.slack,
    };
    let study = spectrum_refinement_study(&plan)?;
    let finest = study.levels.last().expect("at least two levels");

    let (galerkin, basis) = match shape {
        Shape::Interval { a, b } => {
            let g = sine_galerkin_1d(a, b, m, s.solver.galerkin_basis, GalerkinAssembly::Auto)?;
            let mut spec = solve_dense(&g.matrix, false)?;
            spec.truncate(s.solver.count);
            (Some(spec.eigenvalues), Some(g.basis_size))
        }
        _ => (None, None),
    };
    let max_relative_discrepancy = galerkin.as_ref().map(|g| {
        g.iter()
            .zip(&finest.eigenvalues)
            .map(|(a, b)| (b - a).abs() / a)
            .fold(0.0, f64::max)
    });

    let mass_shift = if m > 0.0 {
        let domain = Arc::new(DomainSpec::build(shape.clone(), finest.resolution, finest.padding)?);
        let op = OperatorHandle::fourier(domain, 0.0)?;
        let k = finest.eigenvalues.len();
        let base = solve_operator(&op, k, s.solver.method, s.solver.dense_limit, &s.solver.lanczos(false))?;
        Some(finest.eigenvalues.iter().zip(&base.eigenvalues).map(|(a, b)| a - b).collect())
    } else {
        None
    };

    let domain = DomainSpec::build(shape, s.domain.resolution, s.domain.padding)?.id();
    let table = ComparisonTable {
        schema: 1,
        domain,
        m,
        levels: study.levels,
        galerkin,
        galerkin_basis: basis,
        max_relative_discrepancy,
        mass_shift,
    };
    let dir = output_dir(s);
    std::fs::create_dir_all(&dir)?;
    write_json(&dir.join("compare.json"), &table)?;
    write_csv(&table, &mut std::fs::File::create(dir.join("compare.csv"))?)?;
    Ok(table)
}

fn write_csv(t: &ComparisonTable, out: &mut impl Write) -> Result<()> {
    let mut header = vec!["k".to_string()];
    header.extend(t.levels.iter().map(|l| format!("grid_N{}_pad{}", l.resolution, l.padding)));
    if t.galerkin.is_some() {
        header.push("galerkin".into());
    }
    if t.mass_shift.is_some() {
        header.push("mass_shift".into());
    }
    writeln!(out, "{}", header.join(","))?;
    let rows = t.levels.iter().map(|l| l.eigenvalues.len()).min().unwrap_or(0);
    for i in 0..rows {
        let mut row = vec![(i + 1).to_string()];
        row.extend(t.levels.iter().map(|l| format!("{:.17e}", l.eigenvalues[i])));
        if let Some(g) = &t.galerkin {
            row.push(g.get(i).map(|v| format!("{v:.17e}")).unwrap_or_default());
        }
        if let Some(s) = &t.mass_shift {
            row.push(s.get(i).map(|v| format!("{v:.17e}")).unwrap_or_default());
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    #[test]
    fn interval_table_with_mass() {
        let tmp = tempfile::tempdir().unwrap();
        let text = "[domain]\nshape = \"interval\"\nresolution = 32\n[operator]\nmass = 1.0\n\
                    [solver]\ncount = 4\nlevels = 2\ngalerkin_basis = 200\n";
        let mut s = Scenario::from_toml(text, Path::new(".")).unwrap();
        s.output.dir = Some(tmp.path().to_path_buf());
        let t = compare_methods(&s).unwrap();
        assert_eq!(t.levels.len(), 2);
        assert_eq!(t.galerkin.as_ref().unwrap().len(), 4);
        assert!(t.max_relative_discrepancy.unwrap() < 0.05);
        for shift in t.mass_shift.unwrap() {
            assert!((-1e-8..=1.0 + 1e-8).contains(&shift), "{shift}");
        }
        let csv = std::fs::read_to_string(tmp.path().join("compare.csv")).unwrap();
        assert_eq!(csv.lines().count(), 5);
        assert!(csv.starts_with("k,grid_N32_pad4,grid_N64_pad8,galerkin,mass_shift"));
    }
}
