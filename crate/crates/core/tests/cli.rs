use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn kgspec(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgspec"))
        .args(args)
        .env("KGSPEC_OUTPUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name);
    p.to_string_lossy().into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bundled_interval_scenario_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kgspec(&["run", &scenario("interval_m0.toml")], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = tmp.path().join("interval_m0");
    for f in ["spectrum.json", "bounds.json", "bounds.csv", "profiles.csv", "partition.csv", "summary.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let summary = json(&dir.join("summary.json"));
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["failed"], 0);
    let bounds = json(&dir.join("bounds.json"));
    assert_eq!(bounds["schema"], 1);
    let rows = std::fs::read_to_string(dir.join("bounds.csv")).unwrap().lines().count() - 1;
    assert_eq!(rows, bounds["reports"].as_array().unwrap().len());
    assert_eq!(json(&dir.join("spectrum.json"))["schema"], 1);
    let header = std::fs::read_to_string(dir.join("profiles.csv")).unwrap();
    assert!(header.starts_with("z,"), "{}", header.lines().next().unwrap());
}

#[test]
fn bound_failure_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "strict_weyl.toml",
        "[domain]\nshape = \"disk\"\nresolution = 16\n[solver]\ncount = 24\n\
         [checks]\nnames = [\"weyl\"]\nweyl_tolerance = 0.001\n",
    );
    let out = kgspec(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let summary = json(&tmp.path().join("strict_weyl/summary.json"));
    assert_eq!(summary["exit_code"], 1);
    assert!(summary["failures"]["weyl"].as_u64().unwrap() > 0);
}

#[test]
fn config_errors_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let unknown = write(tmp.path(), "unknown.toml", "[domain]\nshape = \"disk\"\nradiuss = 1.0\n");
    let out = kgspec(&["run", &unknown], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radiuss"));

    let refused = write(
        tmp.path(),
        "refused.toml",
        "[domain]\nshape = \"interval\"\nresolution = 16\n[solver]\ncount = 6\n[checks]\nnames = [\"gap_inradius\"]\n",
    );
    let out = kgspec(&["run", &refused], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("d ≥ 2"));

    let out = kgspec(&["run", &tmp.path().join("missing.toml").to_string_lossy()], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(kgspec(&["frobnicate"], tmp.path()).status.code(), Some(3));
    assert_eq!(kgspec(&["constants", "0"], tmp.path()).status.code(), Some(3));
}

#[test]
fn solver_failure_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "stalled.toml",
        "[domain]\nshape = \"disk\"\nresolution = 16\n[solver]\ncount = 8\nmethod = \"lanczos\"\n\
         tol = 1e-300\nmax_restarts = 1\n[checks]\nmatrix_checks = false\n",
    );
    let out = kgspec(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn jobs_report_the_worst_exit_code() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.toml", "[solver]\ncount = 0\n");
    let out = kgspec(&["run", "--jobs", "2", &scenario("interval_m0.toml"), &bad], tmp.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(tmp.path().join("interval_m0/summary.json").exists());
}

#[test]
fn constants_in_text_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kgspec(&["constants", "2", "--json"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let ratio = v["constants"].as_array().unwrap().iter().find(|c| c["name"] == "ratio").unwrap();
    assert_eq!(ratio["value"], 3.0);

    let out = kgspec(&["constants", "1"], tmp.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let c1 = text.lines().find(|l| l.starts_with("c_d")).unwrap();
    let value: f64 = c1.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((value - 1.0 / std::f64::consts::PI).abs() < 1e-14);
    assert!(!text.contains("ratio"));
}

#[test]
fn selftest_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = kgspec(&["selftest"], tmp.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 5, "{text}");
}

#[test]
fn compare_writes_the_table() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "cmp.toml",
        "[domain]\nshape = \"interval\"\nresolution = 64\n[operator]\nmass = 1.0\n\
         [solver]\ncount = 6\nlevels = 2\ngalerkin_basis = 300\n",
    );
    let out = kgspec(&["compare", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = json(&tmp.path().join("cmp/compare.json"));
    assert_eq!(table["schema"], 1);
    for shift in table["mass_shift"].as_array().unwrap() {
        let s = shift.as_f64().unwrap();
        assert!((-1e-8..=1.0 + 1e-8).contains(&s), "{s}");
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = scenario("interval_m0.toml");
    assert_eq!(kgspec(&["run", &cfg], a.path()).status.code(), Some(0));
    assert_eq!(kgspec(&["run", &cfg], b.path()).status.code(), Some(0));
    for f in ["spectrum.json", "bounds.json", "summary.json", "bounds.csv", "profiles.csv"] {
        let x = std::fs::read(a.path().join("interval_m0").join(f)).unwrap();
        let y = std::fs::read(b.path().join("interval_m0").join(f)).unwrap();
        assert!(x == y, "{f} differs");
    }
}
