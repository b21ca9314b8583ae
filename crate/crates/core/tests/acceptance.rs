//! The twelve acceptance criteria, one test each. Every test writes a
//! single `[PASS]`/`[FAIL] criterion N` line to stdout, bypassing capture,
//! before asserting.

use kgspec::bounds::checks::{unit_ball_sqrt_lambda1, Check, CheckContext};
use kgspec::bounds::{self, interacting, BoundReport};
use kgspec::eigensolve::{
    solve_operator, spectrum_refinement_study, LanczosOptions, RefinementPlan, RefinementStudy, SolverChoice,
};
use kgspec::geometry::{DomainSpec, Shape};
use kgspec::harness::{cache, run_scenario, selftest, Scenario};
use kgspec::operator::{dirichlet_laplacian_spectrum, sine_galerkin_1d, GalerkinAssembly, OperatorHandle};
use kgspec::stats::EigenvalueList;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::sync::{Arc, LazyLock, Mutex, OnceLock};
use std::time::{Duration, Instant};

const K: usize = 40;
const SLACK: f64 = 0.02;
const SEED: u64 = 0x5eed;

fn verdict(n: u32, title: &str, failures: &[String], detail: &str) {
    let tag = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{tag}] criterion {n:>2}: {title}; {detail}");
    for f in failures.iter().take(8) {
        let _ = writeln!(out, "        {f}");
    }
    if failures.len() > 8 {
        let _ = writeln!(out, "        ... {} more", failures.len() - 8);
    }
    let _ = out.flush();
    assert!(failures.is_empty(), "criterion {n} failed: {} violations, first: {}", failures.len(), failures[0]);
}

fn describe(r: &BoundReport) -> String {
    format!(
        "{} k={:?} j={:?} z={:?}: lhs {:.6e} rhs {:.6e} margin {:.3e}",
        r.name, r.context.k, r.context.j, r.context.z, r.lhs, r.rhs, r.margin
    )
}

fn failed(reports: &[BoundReport]) -> Vec<String> {
    reports.iter().filter(|r| !r.pass).map(describe).collect()
}

/// A test domain with its exact area and inradius.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Dom {
    Interval,
    Square,
    Disk,
    LShape,
}

impl Dom {
    fn shape(self) -> Shape {
        match self {
            Dom::Interval => Shape::Interval { a: -1.0, b: 1.0 },
            Dom::Square => Shape::Rectangle { widths: [2.0, 2.0] },
            Dom::Disk => Shape::Disk { radius: 1.0 },
            Dom::LShape => Shape::LShape { long: 2.0, width: 1.0 },
        }
    }

    fn resolution(self) -> usize {
        if self == Dom::Interval {
            256
        } else {
            32
        }
    }

    fn d(self) -> usize {
        if self == Dom::Interval {
            1
        } else {
            2
        }
    }

    fn area(self) -> f64 {
        match self {
            Dom::Interval => 2.0,
            Dom::Square => 4.0,
            Dom::Disk => PI,
            Dom::LShape => 3.0,
        }
    }

    /// The L-shape's largest disk sits in the corner square, centred on the
    /// diagonal, touching both outer sides and the reentrant corner.
    fn inradius(self) -> f64 {
        match self {
            Dom::LShape => 2.0 - 2f64.sqrt(),
            _ => 1.0,
        }
    }

    fn domain(self) -> Arc<DomainSpec> {
        Arc::new(DomainSpec::build(self.shape(), self.resolution(), 4.0).unwrap())
    }

    fn context(self, m: f64) -> CheckContext {
        let mut ctx = CheckContext::new(self.d(), m, self.area(), self.inradius(), format!("{self:?}"));
        ctx.slack = SLACK;
        ctx
    }
}

type Slot = Arc<OnceLock<EigenvalueList>>;
static SPECTRA: LazyLock<Mutex<HashMap<(Dom, u64), Slot>>> = LazyLock::new(Default::default);

/// Lowest `K` eigenvalues of `H_m` on the test grid, computed once per binary.
fn spectrum(dom: Dom, m: f64) -> EigenvalueList {
    let slot = SPECTRA.lock().unwrap().entry((dom, m.to_bits())).or_default().clone();
    slot.get_or_init(|| {
        let op = OperatorHandle::fourier(dom.domain(), m).unwrap();
        let s = solve_operator(&op, K, SolverChoice::Dense, 6000, &LanczosOptions::default()).unwrap();
        EigenvalueList::new(s.eigenvalues).unwrap()
    })
    .clone()
}

/// Interval refinement: N = 512, 1024, 2048 with padding 8, 16, 32.
fn interval_study() -> &'static RefinementStudy {
    static STUDY: OnceLock<RefinementStudy> = OnceLock::new();
    STUDY.get_or_init(|| {
        spectrum_refinement_study(&RefinementPlan {
            shape: Dom::Interval.shape(),
            base_resolution: 512,
            base_padding: 8.0,
            mass: 0.0,
            count: K,
            levels: 3,
            double_padding: true,
            slack: SLACK,
        })
        .unwrap()
    })
}

fn run(check: Check, list: &EigenvalueList, ctx: &CheckContext) -> Vec<BoundReport> {
    check.run(list, ctx).unwrap()
}

#[test]
fn criterion_01_trace_inequalities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (bad, worst) = selftest::trace_violations(&mut rng, 50).unwrap();
    let elapsed = start.elapsed();
    let mut fails: Vec<String> = (bad > 0).then(|| format!("{bad} sums above 1e-9 n β_max²")).into_iter().collect();
    if elapsed >= Duration::from_secs(10) {
        fails.push(format!("runtime {elapsed:?} ≥ 10 s"));
    }
    verdict(
        1,
        "trace inequalities on 50 random symmetric matrices",
        &fails,
        &format!("max scaled sum {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_dense_matches_lanczos() {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut worst = 0.0f64;
    for (shape, res) in [(Dom::Interval.shape(), 16), (Dom::Disk.shape(), 32)] {
        let op = OperatorHandle::fourier(Arc::new(DomainSpec::build(shape, res, 4.0).unwrap()), 0.0).unwrap();
        let opts = LanczosOptions { seed: SEED, ..LanczosOptions::default() };
        let dense = solve_operator(&op, 10, SolverChoice::Dense, 6000, &opts).unwrap();
        let lanczos = solve_operator(&op, 10, SolverChoice::Lanczos, 6000, &opts).unwrap();
        for (k, (a, b)) in dense.eigenvalues.iter().zip(&lanczos.eigenvalues).enumerate() {
            let rel = (a - b).abs() / a.abs();
            worst = worst.max(rel);
            if rel > 1e-8 {
                fails.push(format!("{} k={}: dense {a:.12} lanczos {b:.12}", op.domain.id(), k + 1));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(30) {
        fails.push(format!("runtime {elapsed:?} ≥ 30 s"));
    }
    verdict(2, "dense and Lanczos agree on the lowest 10", &fails, &format!("max relative gap {worst:.2e}, {elapsed:.2?}"));
}

#[test]
fn criterion_03_grid_matches_galerkin() {
    let finest = interval_study().levels.last().unwrap();
    let g = sine_galerkin_1d(-1.0, 1.0, 0.0, 2000, GalerkinAssembly::Auto).unwrap();
    let galerkin = kgspec::eigensolve::solve_dense(&g.matrix, false).unwrap().eigenvalues[0];
    let grid = finest.eigenvalues[0];
    let rel = (grid - galerkin).abs() / galerkin;
    let fails: Vec<String> =
        (rel > 1e-3).then(|| format!("relative gap {rel:.3e} > 1e-3")).into_iter().collect();
    verdict(
        3,
        "β_1 on (−1,1): Fourier grid vs sine-Galerkin n=2000",
        &fails,
        &format!(
            "grid N={} padding {} gives {grid:.6}, Galerkin {galerkin:.6}, relative gap {rel:.2e}",
            finest.resolution, finest.padding
        ),
    );
}

#[test]
fn criterion_04_weyl_law() {
    let mut fails = Vec::new();
    let finest = interval_study().levels.last().unwrap();
    let interval = (20..=K)
        .map(|k| (k, finest.eigenvalues[k - 1] / (k as f64 * PI / 2.0) - 1.0))
        .fold((0, 0.0f64), |a, (k, e)| if e.abs() > a.1.abs() { (k, e) } else { a });
    if interval.1.abs() > 0.05 {
        fails.push(format!("interval k={}: deviation {:.4}", interval.0, interval.1));
    }

    // the disk needs the finest affordable grid: the deviation grows with N
    let disk = Arc::new(DomainSpec::build(Dom::Disk.shape(), 128, 4.0).unwrap());
    let op = OperatorHandle::fourier(disk, 0.0).unwrap();
    let opts = LanczosOptions { seed: SEED, ..LanczosOptions::default() };
    let beta = solve_operator(&op, K, SolverChoice::Lanczos, 6000, &opts).unwrap().eigenvalues;
    let mut disk_worst = (0, 0.0f64);
    for k in 20..=K {
        let e = beta[k - 1] / (2.0 * (k as f64).sqrt()) - 1.0;
        if e.abs() > disk_worst.1.abs() {
            disk_worst = (k, e);
        }
        if e.abs() > 0.08 {
            fails.push(format!("disk N=128 k={k}: deviation {e:.4}"));
        }
    }
    verdict(
        4,
        "Weyl asymptotics for k in [20, 40]",
        &fails,
        &format!(
            "interval max |dev| {:.4} at k={} (limit 0.05), disk max |dev| {:.4} at k={} (limit 0.08)",
            interval.1.abs(),
            interval.0,
            disk_worst.1.abs(),
            disk_worst.0
        ),
    );
}

#[test]
fn criterion_05_li_yau() {
    let mut fails = Vec::new();
    let mut rows = 0;
    for dom in [Dom::Interval, Dom::Square, Dom::Disk, Dom::LShape] {
        let ctx = dom.context(0.0);
        let reports: Vec<_> = run(Check::LiYau, &spectrum(dom, 0.0), &ctx)
            .into_iter()
            .filter(|r| r.context.k.unwrap() <= K / 2)
            .collect();
        rows += reports.len();
        fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} {f}")));
    }
    for dom in [Dom::Interval, Dom::Disk] {
        let mut ctx = dom.context(0.0);
        let dir = dirichlet_laplacian_spectrum(&dom.domain(), K).unwrap();
        assert!(!matches!(dir.method, kgspec::operator::dirichlet::DirichletMethod::FiniteDifference));
        ctx.dirichlet = Some(dir.values);
        ctx.dirichlet_exact = true;
        let reports: Vec<_> = run(Check::SqrtLiYau, &spectrum(dom, 0.0), &ctx)
            .into_iter()
            .filter(|r| r.context.k.unwrap() <= K / 2)
            .collect();
        assert!(reports.iter().all(|r| r.slack == 0.0));
        rows += reports.len();
        fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} {f}")));
    }
    verdict(5, "mean-eigenvalue lower bounds, k ≤ K/2", &fails, &format!("{rows} comparisons"));
}

#[test]
fn criterion_06_ratio_chain() {
    let mut fails = Vec::new();
    let mut rows = 0;
    for dom in [Dom::Square, Dom::Disk, Dom::LShape] {
        let list = spectrum(dom, 0.0);
        let reports: Vec<_> = run(Check::RatioChain, &list, &dom.context(0.0))
            .into_iter()
            .filter(|r| !r.name.starts_with("chain_"))
            .collect();
        rows += reports.len();
        fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} {f}")));
        // the ordering of the three bounds, with no allowance at all
        for k in 1..=K / 2 {
            let r = bounds::ratio_root_bound(&list, k, 2).unwrap();
            rows += 1;
            if !(r.root <= r.simple_harmonic && r.simple_harmonic <= r.simple_mean) {
                fails.push(format!(
                    "{dom:?} k={k}: root {:.17e} harmonic {:.17e} mean {:.17e}",
                    r.root, r.simple_harmonic, r.simple_mean
                ));
            }
        }
    }
    verdict(6, "universal ratio chain on the d=2 domains, k ≤ K/2", &fails, &format!("{rows} comparisons"));
}

#[test]
fn criterion_07_mass_sandwich() {
    let mut fails = Vec::new();
    let base = spectrum(Dom::Disk, 0.0);
    let mut extremes = (f64::INFINITY, f64::NEG_INFINITY);
    for m in [0.5, 1.0, 2.0] {
        let list = spectrum(Dom::Disk, m);
        for k in 1..=K {
            let diff = list.beta(k) - base.beta(k);
            extremes = (extremes.0.min(diff), extremes.1.max(diff - m));
            if !(diff >= -1e-8 && diff <= m + 1e-8) {
                fails.push(format!("m={m} k={k}: β_k(m) − β_k(0) = {diff:.3e}"));
            }
        }
    }
    verdict(
        7,
        "0 ≤ β_k(m) − β_k(0) ≤ m on the disk, m ∈ {0.5, 1, 2}",
        &fails,
        &format!("min shift {:.3e}, max shift − m {:.3e}", extremes.0, extremes.1),
    );
}

#[test]
fn criterion_08_domination() {
    let mut fails = Vec::new();
    let mut rows = 0;
    for dom in [Dom::Interval, Dom::Disk] {
        let lambda = dirichlet_laplacian_spectrum(&dom.domain(), K).unwrap().values;
        for m in [0.0, 1.0] {
            let mut ctx = dom.context(m);
            ctx.dirichlet = Some(lambda.clone());
            let reports = run(Check::Domination, &spectrum(dom, m), &ctx);
            rows += reports.len();
            fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} m={m} {f}")));
        }
    }
    verdict(8, "β_k ≤ √(λ_k + m²) + 2%", &fails, &format!("{rows} comparisons"));
}

#[test]
fn criterion_09_monotonicity_riesz_legendre_mean_ratio() {
    let mut fails = Vec::new();
    let mut counts = [0usize; 4];
    let computed = [
        (Dom::Interval, 0.0),
        (Dom::Interval, 1.0),
        (Dom::Square, 0.0),
        (Dom::Disk, 0.0),
        (Dom::Disk, 0.5),
        (Dom::Disk, 1.0),
        (Dom::Disk, 2.0),
        (Dom::LShape, 0.0),
    ];
    for (dom, m) in computed {
        let list = spectrum(dom, m);
        let ctx = dom.context(m);
        let p = (dom.d() + 1) as f64;
        let mono = list.monotonicity_profile(p, &list.log_grid(40 * K)).unwrap();
        counts[0] += 1;
        if !mono.holds(1e-9) {
            fails.push(format!("{dom:?} m={m} U/z^p drops by {:.3e} at z={:.4}", -mono.worst_difference, mono.at));
        }
        let legendre = run(Check::Legendre, &list, &ctx);
        counts[2] += legendre.len();
        fails.extend(failed(&legendre).into_iter().map(|f| format!("{dom:?} m={m} {f}")));
        if dom.d() >= 2 {
            for (check, slot) in [(Check::Riesz, 1), (Check::MeanRatio, 3)] {
                let reports = run(check, &list, &ctx);
                counts[slot] += reports.len();
                fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} m={m} {f}")));
            }
        }
    }
    verdict(
        9,
        "U-monotonicity, Riesz lower bound, Legendre duality, mean ratio",
        &fails,
        &format!(
            "{} monotonicity profiles, {} Riesz, {} Legendre, {} mean-ratio comparisons",
            counts[0], counts[1], counts[2], counts[3]
        ),
    );
}

#[test]
fn criterion_10_gap_inradius() {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cache").join("beta1_star_d2.json");
    let star = cache::load_or_compute(2, &path).unwrap();
    let sqrt_l1 = unit_ball_sqrt_lambda1(2).unwrap();
    let mut fails = Vec::new();
    if (sqrt_l1 - 2.404825557695773).abs() > 1e-12 {
        fails.push(format!("j_(0,1) = {sqrt_l1}"));
    }
    let mut detail = format!("β_1* = {:.5} from N={:?}", star.value, star.resolutions);
    for dom in [Dom::Disk, Dom::Square, Dom::LShape] {
        let list = spectrum(dom, 0.0);
        let mut ctx = dom.context(0.0);
        ctx.beta1_star = Some(star.value);
        let reports = run(Check::GapInradius, &list, &ctx);
        fails.extend(failed(&reports).into_iter().map(|f| format!("{dom:?} {f}")));
        let r = reports.iter().find(|r| r.name == "gap_inradius").unwrap();
        detail += &format!("; {dom:?} gap {:.4} ≤ {:.4}", r.lhs, r.rhs);
    }
    verdict(10, "β_2 − β_1 ≤ (2/(d−1)) β_1*/Inr + 2%", &fails, &detail);
}

#[test]
fn criterion_11_interacting() {
    let tmp = tempfile::tempdir().unwrap();
    let text = include_str!("../../../scenarios/disk_potential.toml");
    let mut s = Scenario::from_toml(text, Path::new(".")).unwrap();
    s.output.dir = Some(tmp.path().to_path_buf());
    let out = run_scenario(&s).unwrap();
    let alpha = out.summary.alpha.unwrap();

    let mut fails = Vec::new();
    if !(0.25..=0.5).contains(&alpha) {
        fails.push(format!("α = {alpha} outside [0.25, 0.5]"));
    }
    for name in [
        "admissibility",
        "interacting_ratio",
        "interacting_root",
        "interacting_monotonicity",
        "interacting_mean_ratio",
        "interacting_riesz",
    ] {
        if !out.reports.iter().any(|r| r.name == name) {
            fails.push(format!("no `{name}` reports"));
        }
    }
    fails.extend(failed(&out.reports));

    // α = 0 reproduces the free bounds on the same eigenvalues
    let list = EigenvalueList::new(out.spectrum.eigenvalues.clone()).unwrap();
    let mut worst = 0.0f64;
    let mut compare = |what: String, a: f64, b: f64| {
        let rel = (a - b).abs() / b.abs();
        worst = worst.max(rel);
        if rel > 1e-12 {
            fails.push(format!("α=0 {what}: {a:.17e} vs {b:.17e}"));
        }
    };
    compare("exponent".into(), interacting::exponent(0.0, 2), 3.0);
    compare("ratio constant".into(), interacting::ratio_constant(0.0, 2).unwrap(), 3.0);
    for k in 1..=K / 2 {
        if let Ok(free) = bounds::ratio_root_bound(&list, k, 2) {
            compare(format!("root k={k}"), interacting::root_bound(&list, k, 2, 0.0).unwrap(), free.root);
        }
    }
    for j in 1..=K / 2 {
        let z = bounds::riesz_threshold(&list, j, 2) * 1.1;
        let free = bounds::riesz_lower_bound(&list, j, 2, z).unwrap().value;
        compare(format!("Riesz j={j}"), interacting::riesz_lower_bound(&list, j, 2, 0.0, z).unwrap().value, free);
        for k in (2 * j + 1)..=K / 2 {
            let free = bounds::mean_ratio_bound(j, k, 2).unwrap();
            compare(format!("mean ratio j={j} k={k}"), interacting::mean_ratio_bound(j, k, 2, 0.0).unwrap(), free);
        }
    }
    verdict(
        11,
        "interacting bounds with a bump potential on the disk",
        &fails,
        &format!("α = {alpha:.4}, {} reports, α=0 max relative gap {worst:.1e}", out.reports.len()),
    );
}

#[test]
fn criterion_12_bathtub() {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (worst, equality) = selftest::bathtub_margins(&mut rng, 100).unwrap();
    let mut fails = Vec::new();
    if worst > 1e-6 {
        fails.push(format!("∫f exceeds the bound by {worst:.3e}"));
    }
    if equality > 1.0 {
        fails.push(format!("equality case off by {equality:.3} lattice allowances"));
    }
    verdict(
        12,
        "bathtub estimate on d ∈ {1, 2} grids",
        &fails,
        &format!("max ∫f − bound {worst:.3e}, equality error {equality:.2e} of its quadrature allowance"),
    );
}
