use crate::bounds::Constants;
use crate::error::Result;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub name: &'static str,
    pub value: f64,
    pub anchor: &'static str,
}

/// Closed-form constants for dimension `d`, each with what it belongs to.
pub fn emit_constants(d: usize) -> Result<Vec<ConstantEntry>> {
    let c = Constants::new(d)?;
    let mut out = vec![
        ConstantEntry { name: "c_d", value: c.c_d, anchor: "semiclassical constant d!/((4π)^{d/2}Γ(1+d/2))" },
        ConstantEntry { name: "omega", value: c.omega, anchor: "surface measure |S^{d−1}|" },
        ConstantEntry { name: "weyl_counting", value: c.weyl_counting, anchor: "N(β) ~ C|Ω|β^d" },
        ConstantEntry { name: "weyl_beta", value: c.weyl_beta, anchor: "β_k ~ C(k/|Ω|)^{1/d}" },
        ConstantEntry { name: "li_yau", value: c.li_yau, anchor: "β̄_k ≥ C(k/|Ω|)^{1/d}" },
        ConstantEntry { name: "li_yau_old", value: c.li_yau_old, anchor: "earlier mean bound coefficient" },
    ];
    let optional = [
        ("ratio", c.ratio, "β_2/β_1 ≤ (d+1)/(d−1)"),
        ("mean_ratio", c.mean_ratio, "β̄_k/β̄_j ≤ C(k/j)^{1/d}, k > 2j"),
        ("weyl_u", c.weyl_u, "U(z) ~ C|Ω|z^{d+1}"),
    ];
    out.extend(
        optional
            .into_iter()
            .filter_map(|(name, v, anchor)| v.map(|value| ConstantEntry { name, value, anchor })),
    );
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn get(d: usize, name: &str) -> Option<f64> {
        emit_constants(d).unwrap().into_iter().find(|c| c.name == name).map(|c| c.value)
    }

    #[test]
    fn hand_values() {
        assert!((get(1, "c_d").unwrap() - 1.0 / PI).abs() < 1e-15);
        assert_eq!(get(1, "ratio"), None);
        assert_eq!(get(2, "ratio"), Some(3.0));
        let mr = get(3, "mean_ratio").unwrap();
        assert!((mr - 3.0 / (2f64.powf(1.0 / 3.0) * 2.0)).abs() < 1e-14);
        assert!(emit_constants(0).is_err());
    }
}
