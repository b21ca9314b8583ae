use crate::bounds::interacting::alpha_from_norm;
use crate::geometry::DomainSpec;
use serde::Serialize;

/// Grid samples of an external potential on the interior cells.
#[derive(Debug, Clone, Serialize)]
pub struct PotentialSpec {
    pub values: Vec<f64>,
    /// Lebesgue exponent used for `‖V_−‖_s`.
    pub exponent: f64,
    /// Midpoint-rule `(Σ V_−^s h^d)^{1/s}`.
    pub negative_norm: f64,
    /// The interaction constant, when `2 ≤ d < s < ∞`.
    pub alpha: Option<f64>,
}

impl PotentialSpec {
    pub fn new(domain: &DomainSpec, values: Vec<f64>, exponent: f64) -> Self {
        let cell = domain.cell_volume();
        let negative_norm = values
            .iter()
            .map(|v| (-v).max(0.0).powf(exponent) * cell)
            .sum::<f64>()
            .powf(1.0 / exponent);
        let d = domain.dimension();
        let alpha = alpha_from_norm(negative_norm, exponent, d, domain.volume).ok();
        PotentialSpec { values, exponent, negative_norm, alpha }
    }

    /// Samples `f` at the interior cell centres.
    pub fn from_fn(domain: &DomainSpec, exponent: f64, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = domain
            .interior
            .iter()
            .map(|&i| f(&domain.cell_center(i)))
            .collect();
        Self::new(domain, values, exponent)
    }

    pub fn positive_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.max(0.0)).collect()
    }

    pub fn negative_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| (-v).max(0.0)).collect()
    }

    pub fn admissible(&self) -> bool {
        self.alpha.is_some_and(|a| a < 1.0)
    }
}
