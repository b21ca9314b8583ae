//! Scenario files: TOML with `[domain]`, `[operator]`, `[solver]`,
//! `[checks]` and `[output]` sections. Unknown keys are errors.

use crate::eigensolve::{LanczosOptions, SolverChoice};
use crate::error::{Error, Result};
use crate::geometry::{mask_file, DomainSpec, Shape, DEFAULT_PADDING};
use crate::operator::{PotentialSpec, DEFAULT_DENSE_LIMIT};
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// Defaults to the file stem.
    pub name: Option<String>,
    pub domain: DomainConfig,
    #[serde(default)]
    pub operator: OperatorConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Interval,
    Rectangle,
    Disk,
    Annulus,
    LShape,
    Custom,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: ShapeKind,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub widths: Option<[f64; 2]>,
    pub radius: Option<f64>,
    pub r_in: Option<f64>,
    pub r_out: Option<f64>,
    pub long: Option<f64>,
    pub width: Option<f64>,
    /// Mask file for `custom`.
    pub mask: Option<PathBuf>,
    pub cell_size: Option<f64>,
    #[serde(default = "default_resolution")]
    pub resolution: usize,
    #[serde(default = "default_padding")]
    pub padding: f64,
}

fn default_resolution() -> usize {
    32
}

fn default_padding() -> f64 {
    DEFAULT_PADDING
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    #[serde(default)]
    pub mass: f64,
    pub potential: Option<PotentialConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `−depth (1 − |x|²/radius²)²` inside the ball of `radius`, else 0.
    Bump,
    Constant,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    /// Bump depth; exclusive with `alpha`.
    pub depth: Option<f64>,
    /// Target interaction constant; the depth is scaled to reach it.
    pub alpha: Option<f64>,
    pub radius: Option<f64>,
    /// Constant value.
    pub value: Option<f64>,
    #[serde(default = "default_exponent")]
    pub exponent: f64,
}

fn default_exponent() -> f64 {
    3.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub method: SolverChoice,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_dense_limit")]
    pub dense_limit: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_block")]
    pub block_size: usize,
    #[serde(default = "default_restarts")]
    pub max_restarts: usize,
    /// Refinement levels for `compare`.
    #[serde(default = "default_levels")]
    pub levels: usize,
    #[serde(default = "default_true")]
    pub double_padding: bool,
    #[serde(default = "default_basis")]
    pub galerkin_basis: usize,
}

fn default_count() -> usize {
    20
}
fn default_tol() -> f64 {
    1e-9
}
fn default_dense_limit() -> usize {
    DEFAULT_DENSE_LIMIT
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_block() -> usize {
    4
}
fn default_restarts() -> usize {
    50
}
fn default_levels() -> usize {
    3
}
fn default_true() -> bool {
    true
}
fn default_basis() -> usize {
    2000
}

impl Default for SolverConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty solver section")
    }
}

impl SolverConfig {
    pub fn lanczos(&self, want_vectors: bool) -> LanczosOptions {
        LanczosOptions {
            tol: self.tol,
            block_size: self.block_size,
            max_restarts: self.max_restarts,
            seed: self.seed,
            want_vectors,
            ..LanczosOptions::default()
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    /// Checks to run; all applicable ones when absent.
    pub names: Option<Vec<String>>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    pub weyl_tolerance: Option<f64>,
    pub weyl_range: Option<[usize; 2]>,
    #[serde(default = "default_z_points")]
    pub z_points: usize,
    /// Run the matrix-based checks when dense assembly fits `dense_limit`.
    #[serde(default = "default_true")]
    pub matrix_checks: bool,
    /// Where the unit-ball ground state is cached.
    pub beta1_star_cache: Option<PathBuf>,
}

fn default_slack() -> f64 {
    crate::bounds::DISCRETIZATION_SLACK
}
fn default_z_points() -> usize {
    12
}

impl Default for ChecksConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty checks section")
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    #[serde(default = "default_profile_points")]
    pub profile_points: usize,
    #[serde(default = "default_partition_points")]
    pub partition_points: usize,
}

fn default_profile_points() -> usize {
    200
}
fn default_partition_points() -> usize {
    50
}

impl Default for OutputConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty output section")
    }
}

impl Scenario {
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let mut s: Scenario = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.base_dir = base_dir.to_path_buf();
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut s = Self::from_toml(&text, base).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if s.name.is_none() {
            s.name = path.file_stem().map(|n| n.to_string_lossy().into_owned());
        }
        Ok(s)
    }

    pub fn name(&self) -> &str {
        self.name.as_deref().unwrap_or("scenario")
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.solver.count == 0 {
            return bad("solver.count must be positive".into());
        }
        if !(self.operator.mass >= 0.0) {
            return bad(format!("operator.mass = {} must be nonnegative", self.operator.mass));
        }
        if !(self.checks.slack >= 0.0) {
            return bad("checks.slack must be nonnegative".into());
        }
        if let Some(p) = &self.operator.potential {
            match p.kind {
                PotentialKind::Bump if p.depth.is_some() == p.alpha.is_some() => {
                    return bad("bump potential needs exactly one of `depth` and `alpha`".into())
                }
                PotentialKind::Constant if p.value.is_none() => {
                    return bad("constant potential needs `value`".into())
                }
                PotentialKind::Constant if p.depth.is_some() || p.alpha.is_some() || p.radius.is_some() => {
                    return bad("constant potential takes only `value` and `exponent`".into())
                }
                PotentialKind::Bump if p.value.is_some() => {
                    return bad("bump potential does not take `value`".into())
                }
                _ => {}
            }
        }
        if let Some(names) = &self.checks.names {
            for n in names {
                crate::bounds::checks::Check::parse(n)?;
            }
        }
        self.domain.shape(&self.base_dir).map(|_| ())
    }
}

impl DomainConfig {
    /// The shape, rejecting keys that do not belong to it.
    pub fn shape(&self, base_dir: &Path) -> Result<Shape> {
        let given: [(&str, bool); 10] = [
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("widths", self.widths.is_some()),
            ("radius", self.radius.is_some()),
            ("r_in", self.r_in.is_some()),
            ("r_out", self.r_out.is_some()),
            ("long", self.long.is_some()),
            ("width", self.width.is_some()),
            ("mask", self.mask.is_some()),
            ("cell_size", self.cell_size.is_some()),
        ];
        let (kind, allowed): (&str, &[&str]) = match self.shape {
            ShapeKind::Interval => ("interval", &["a", "b"]),
            ShapeKind::Rectangle => ("rectangle", &["widths"]),
            ShapeKind::Disk => ("disk", &["radius"]),
            ShapeKind::Annulus => ("annulus", &["r_in", "r_out"]),
            ShapeKind::LShape => ("l_shape", &["long", "width"]),
            ShapeKind::Custom => ("custom", &["mask", "cell_size"]),
        };
        if let Some((key, _)) = given.iter().find(|(k, set)| *set && !allowed.contains(k)) {
            return Err(Error::Config(format!("domain key `{key}` does not apply to shape `{kind}`")));
        }
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Config(format!("shape `{kind}` needs `{key}`")))
        };
        Ok(match self.shape {
            ShapeKind::Interval => Shape::Interval { a: self.a.unwrap_or(-1.0), b: self.b.unwrap_or(1.0) },
            ShapeKind::Rectangle => Shape::Rectangle {
                widths: self.widths.ok_or_else(|| Error::Config("shape `rectangle` needs `widths`".into()))?,
            },
            ShapeKind::Disk => Shape::Disk { radius: self.radius.unwrap_or(1.0) },
            ShapeKind::Annulus => Shape::Annulus { r_in: need(self.r_in, "r_in")?, r_out: need(self.r_out, "r_out")? },
            ShapeKind::LShape => Shape::LShape { long: need(self.long, "long")?, width: need(self.width, "width")? },
            ShapeKind::Custom => {
                let path = self.mask.as_ref().ok_or_else(|| Error::Config("shape `custom` needs `mask`".into()))?;
                let h = need(self.cell_size, "cell_size")?;
                Shape::Custom(mask_file::load(&base_dir.join(path), h).map_err(|e| Error::Config(e.to_string()))?)
            }
        })
    }

    pub fn build(&self, base_dir: &Path) -> Result<DomainSpec> {
        DomainSpec::build(self.shape(base_dir)?, self.resolution, self.padding)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

impl PotentialConfig {
    /// Samples the potential; `alpha` targets are met by scaling the depth.
    pub fn sample(&self, domain: &DomainSpec) -> Result<PotentialSpec> {
        match self.kind {
            PotentialKind::Constant => {
                let v = self.value.unwrap_or_default();
                Ok(PotentialSpec::from_fn(domain, self.exponent, |_| v))
            }
            PotentialKind::Bump => {
                let r2 = self.radius.unwrap_or(1.0).powi(2);
                let bump = |depth: f64| {
                    move |x: &[f64]| {
                        let t = 1.0 - x.iter().map(|v| v * v).sum::<f64>() / r2;
                        -depth * t.max(0.0).powi(2)
                    }
                };
                let depth = match (self.depth, self.alpha) {
                    (Some(d), _) => d,
                    (None, Some(target)) => {
                        let unit = PotentialSpec::from_fn(domain, self.exponent, bump(1.0));
                        let a = unit.alpha.ok_or_else(|| {
                            Error::Config(format!(
                                "no interaction constant for s = {} in d = {}",
                                self.exponent,
                                domain.dimension()
                            ))
                        })?;
                        target / a
                    }
                    (None, None) => unreachable!("validated"),
                };
                Ok(PotentialSpec::from_fn(domain, self.exponent, bump(depth)))
            }
        }
    }
}
