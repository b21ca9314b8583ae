//! Scenario pipeline: domain, operator, spectrum, statistics, checks and
//! report files.

pub mod cache;
pub mod compare;
pub mod config;
pub mod constants;
pub mod selftest;

pub use compare::{compare_methods, ComparisonTable};
pub use config::Scenario;
pub use constants::{emit_constants, ConstantEntry};

use crate::bounds::checks::{default_checks, trace_reports, uvsr1_reports, Check, CheckContext};
use crate::bounds::{weyl_counting, weyl_u, write_reports_csv, BoundReport};
use crate::eigensolve::{solve_dense, solve_operator, Spectrum};
use crate::error::{Error, Result};
use crate::geometry::DomainSpec;
use crate::operator::{dirichlet_laplacian_spectrum, OperatorHandle};
use crate::stats::{log_grid, write_profile_csv, EigenvalueList};
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Overrides the output directory; scenarios write to `<dir>/<name>`.
pub const OUTPUT_ENV: &str = "KGSPEC_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_FAILURE: i32 = 1;
pub const EXIT_SOLVER_FAILURE: i32 = 2;
pub const EXIT_CONFIG_ERROR: i32 = 3;

/// Exit status for an error: configuration problems are 3, the rest 2.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidDomain(_) => EXIT_CONFIG_ERROR,
        _ => EXIT_SOLVER_FAILURE,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub name: String,
    pub domain: String,
    pub d: usize,
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub cells: usize,
    pub count: usize,
    pub solver: String,
    pub checks: Vec<String>,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    /// Failed report count per check name.
    pub failures: BTreeMap<String, usize>,
    pub exit_code: i32,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub summary: Summary,
    pub reports: Vec<BoundReport>,
    pub spectrum: Spectrum,
    pub dir: PathBuf,
}

/// Where a scenario writes: the env override, else `[output] dir`, else
/// `out/<name>`.
pub fn output_dir(s: &Scenario) -> PathBuf {
    if let Some(root) = std::env::var_os(OUTPUT_ENV) {
        return PathBuf::from(root).join(s.name());
    }
    match &s.output.dir {
        Some(d) if d.is_absolute() => d.clone(),
        Some(d) => s.base_dir.join(d),
        None => PathBuf::from("out").join(s.name()),
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn solve(op: &OperatorHandle, s: &Scenario, k: usize, vectors: bool) -> Result<Spectrum> {
    solve_operator(op, k, s.solver.method, s.solver.dense_limit, &s.solver.lanczos(vectors))
}

/// Which checks to run. Explicitly requested checks that cannot run are a
/// configuration error.
fn select_checks(s: &Scenario, ctx: &CheckContext, k: usize, matrices: bool) -> Result<Vec<Check>> {
    let Some(names) = &s.checks.names else {
        return Ok(default_checks(ctx, k, matrices));
    };
    let mut out = Vec::new();
    for n in names {
        let c = Check::parse(n)?;
        if let Err(why) = c.applicable(ctx, k) {
            return Err(Error::Config(format!("check `{n}` {why}")));
        }
        if !c.list_based() && !matrices {
            return Err(Error::Config(format!(
                "check `{n}` needs dense assembly; raise solver.dense_limit or set checks.matrix_checks"
            )));
        }
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn wants(s: &Scenario, c: Check) -> bool {
    s.checks.names.as_ref().is_none_or(|n| n.iter().any(|x| x == c.name()))
}

/// Runs one scenario end to end and writes its report bundle.
pub fn run_scenario(s: &Scenario) -> Result<RunOutcome> {
    let domain = Arc::new(s.domain.build(&s.base_dir)?);
    let d = domain.dimension();
    let n = domain.interior_count();
    let k = s.solver.count.min(n);
    let m = s.operator.mass;

    let potential = match &s.operator.potential {
        Some(p) => Some(Arc::new(p.sample(&domain)?)),
        None => None,
    };
    let free = OperatorHandle::fourier(domain.clone(), m)?;
    let op = match &potential {
        Some(p) => free.clone().with_potential(p.clone())?,
        None => free.clone(),
    };

    let mut ctx = CheckContext::new(d, m, domain.volume, domain.inradius, domain.id());
    ctx.slack = s.checks.slack;
    ctx.z_points = s.checks.z_points;
    if let Some(t) = s.checks.weyl_tolerance {
        ctx.weyl_tolerance = t;
    }
    if let Some([lo, hi]) = s.checks.weyl_range {
        ctx.weyl_range = (lo, hi);
    }
    if let Some(p) = &potential {
        ctx.alpha = Some(p.alpha.ok_or_else(|| {
            Error::Config(format!("potential exponent s = {} gives no interaction constant in d = {d}", p.exponent))
        })?);
    }
    let matrices = s.checks.matrix_checks && n <= s.solver.dense_limit;
    let free_checks = potential.is_none();
    if free_checks && (wants(s, Check::Domination) || wants(s, Check::SqrtLiYau)) {
        let dir = dirichlet_laplacian_spectrum(&domain, k)?;
        ctx.dirichlet_exact = !matches!(dir.method, crate::operator::dirichlet::DirichletMethod::FiniteDifference);
        ctx.dirichlet = Some(dir.values);
    }
    if free_checks && d >= 2 && m == 0.0 && wants(s, Check::GapInradius) {
        let path = match &s.checks.beta1_star_cache {
            Some(p) => s.base_dir.join(p),
            None => output_dir(s).join("..").join("cache").join(format!("beta1_star_d{d}.json")),
        };
        ctx.beta1_star = Some(cache::load_or_compute(d, &path)?.value);
    }
    if free_checks && m > 0.0 && wants(s, Check::MassSandwich) {
        let massless = OperatorHandle::fourier(domain.clone(), 0.0)?;
        ctx.massless = Some(solve(&massless, s, k, false)?.eigenvalues);
    }
    let checks = select_checks(s, &ctx, k, matrices)?;
    let need_matrix = checks.iter().any(|c| !c.list_based());

    let mut matrix = None;
    let spectrum = if need_matrix {
        let start = std::time::Instant::now();
        let h = op.assemble_dense(s.solver.dense_limit)?.matrix;
        let mut spec = solve_dense(&h, true)?;
        spec.truncate(k);
        spec.metadata.runtime = start.elapsed();
        spec.metadata.method = op.method.as_str().into();
        spec.metadata.grid = Some(domain.resolution);
        spec.metadata.padding = Some(domain.padding);
        spec.metadata.mass = m;
        matrix = Some(h);
        spec
    } else {
        solve(&op, s, k, false)?
    };
    let list = EigenvalueList::new(spectrum.eigenvalues.clone())?;

    let mut reports = Vec::new();
    for c in &checks {
        match c {
            Check::Trace => {
                let h = matrix.as_ref().expect("assembled");
                let coords: Vec<Vec<f64>> = (0..d).map(|a| domain.interior_coordinates(a)).collect();
                let vecs = spectrum.eigenvectors.as_deref().unwrap_or_default();
                reports.extend(trace_reports(h, &spectrum.eigenvalues, vecs, &coords, &ctx)?);
            }
            Check::UvsR1 => {
                let h0 = match &potential {
                    Some(_) => free.assemble_dense(s.solver.dense_limit)?.matrix,
                    None => matrix.clone().expect("assembled"),
                };
                let vecs = spectrum.eigenvectors.as_deref().unwrap_or_default();
                reports.extend(uvsr1_reports(&h0, &spectrum.eigenvalues, vecs, &ctx)?);
            }
            c => reports.extend(c.run(&list, &ctx)?),
        }
    }

    let dir = output_dir(s);
    std::fs::create_dir_all(&dir)?;
    write_outputs(&dir, s, &spectrum, &list, &reports, &domain, &ctx)?;

    let failed: Vec<&BoundReport> = reports.iter().filter(|r| !r.pass).collect();
    let mut failures = BTreeMap::new();
    for r in &failed {
        *failures.entry(r.name.clone()).or_insert(0) += 1;
    }
    let summary = Summary {
        schema: 1,
        name: s.name().into(),
        domain: domain.id(),
        d,
        m,
        alpha: ctx.alpha,
        cells: n,
        count: k,
        solver: spectrum.metadata.solver.clone(),
        checks: checks.iter().map(|c| c.name().to_string()).collect(),
        total: reports.len(),
        passed: reports.len() - failed.len(),
        failed: failed.len(),
        failures,
        exit_code: if failed.is_empty() { EXIT_OK } else { EXIT_BOUND_FAILURE },
    };
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(RunOutcome { summary, reports, spectrum, dir })
}

#[derive(Serialize)]
struct BoundsJson<'a> {
    schema: u32,
    reports: &'a [BoundReport],
}

fn write_outputs(
    dir: &Path,
    s: &Scenario,
    spectrum: &Spectrum,
    list: &EigenvalueList,
    reports: &[BoundReport],
    domain: &DomainSpec,
    ctx: &CheckContext,
) -> Result<()> {
    write_json(&dir.join("spectrum.json"), &spectrum.to_json())?;
    write_json(&dir.join("bounds.json"), &BoundsJson { schema: 1, reports })?;
    let mut csv = std::io::BufWriter::new(std::fs::File::create(dir.join("bounds.csv"))?);
    write_reports_csv(reports, &mut csv)?;
    csv.flush()?;

    let d = domain.dimension();
    let p = match ctx.alpha {
        Some(a) => crate::bounds::interacting::exponent(a, d),
        None => (d + 1) as f64,
    };
    let mut rows = list.profile(p, &list.log_grid(s.output.profile_points.max(2)));
    for r in &mut rows {
        r.weyl_counting = Some(weyl_counting(r.z, d, domain.volume));
        r.weyl_u = weyl_u(r.z, d, domain.volume).ok();
    }
    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("profiles.csv"))?);
    write_profile_csv(&rows, &mut out)?;
    out.flush()?;

    let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("partition.csv"))?);
    writeln!(out, "t,Z,tail_bound")?;
    for t in log_grid(0.1 / list.ceiling(), 10.0 / list.beta(1), s.output.partition_points.max(2)) {
        let (z, tail) = list.partition_function(t)?;
        writeln!(out, "{t:.17e},{z:.17e},{tail:.17e}")?;
    }
    out.flush()?;
    Ok(())
}
