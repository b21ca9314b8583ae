//! Ground state of the massless operator on the unit ball, computed once
//! per dimension and cached with the grids that produced it.

use crate::eigensolve::{spectrum_refinement_study, RefinementPlan};
use crate::error::{Error, Result};
use crate::geometry::Shape;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallGroundState {
    pub schema: u32,
    pub d: usize,
    /// Finest-level value.
    pub value: f64,
    pub method: String,
    pub resolutions: Vec<usize>,
    pub paddings: Vec<f64>,
    /// `β_1` per level.
    pub levels: Vec<f64>,
    /// Change between the last two levels.
    pub cauchy: f64,
}

/// Refinement used for the unit disk.
pub fn unit_disk_plan() -> RefinementPlan {
    RefinementPlan {
        shape: Shape::Disk { radius: 1.0 },
        base_resolution: 16,
        base_padding: 4.0,
        mass: 0.0,
        count: 1,
        levels: 2,
        double_padding: false,
        slack: crate::bounds::DISCRETIZATION_SLACK,
    }
}

pub fn compute(d: usize) -> Result<BallGroundState> {
    if d != 2 {
        return Err(Error::Unsupported(format!("unit-ball ground state is computed for d = 2 only, got {d}")));
    }
    let study = spectrum_refinement_study(&unit_disk_plan())?;
    let levels: Vec<f64> = study.levels.iter().map(|l| l.eigenvalues[0]).collect();
    Ok(BallGroundState {
        schema: 1,
        d,
        value: *levels.last().unwrap(),
        method: "fourier_grid".into(),
        resolutions: study.levels.iter().map(|l| l.resolution).collect(),
        paddings: study.levels.iter().map(|l| l.padding).collect(),
        cauchy: study.cauchy.last().map(|c| c[0]).unwrap_or_default(),
        levels,
    })
}

/// Reads the cache at `path`, or computes and writes it. A cache whose
/// provenance does not match the current plan is recomputed.
pub fn load_or_compute(d: usize, path: &Path) -> Result<BallGroundState> {
    if let Ok(text) = std::fs::read_to_string(path) {
        if let Ok(c) = serde_json::from_str::<BallGroundState>(&text) {
            let plan = unit_disk_plan();
            let expected: Vec<usize> = (0..plan.levels).map(|l| plan.base_resolution << l).collect();
            if c.d == d && c.schema == 1 && c.resolutions == expected {
                return Ok(c);
            }
        }
    }
    let c = compute(d)?;
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, serde_json::to_string_pretty(&c)? + "\n")?;
    Ok(c)
}
