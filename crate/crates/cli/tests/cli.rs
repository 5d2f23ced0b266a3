use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;

use minlap_cli::{parse_range, ReportEnvelope, RunConfig};

fn minlap(args: &[&str], out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_minlap"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("MINLAP_THREADS", "2")
        .output()
        .expect("binary runs");
    let text = String::from_utf8_lossy(&o.stdout).to_string() + &String::from_utf8_lossy(&o.stderr);
    (o.status.code().unwrap_or(-1), text)
}

fn envelope(dir: &Path) -> ReportEnvelope {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn csv_column(path: &Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap();
    rdr.records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

fn write_config(dir: &Path, value: serde_json::Value) -> String {
    let path = dir.join("cfg.json");
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn volume_on_plane() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = minlap(
        &[
            "volume",
            "--surface",
            "plane",
            "--n",
            "2",
            "--radii",
            "1:10:10",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let ratio = csv_column(&dir.path().join("volume.csv"), "ratio");
    assert_eq!(ratio.len(), 10);
    assert!(ratio.iter().all(|r| (r - PI).abs() < 1e-4), "{ratio:?}");
    let raw = std::fs::read_to_string(dir.path().join("volume.csv")).unwrap();
    assert!(raw.starts_with("r,V,ratio,miranda_rhs,mu_partial\n"));
    // 17 significant digits in scientific notation.
    let first = raw.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first, "1.0000000000000000e0");
    let env = envelope(dir.path());
    assert_eq!(env.command, "volume");
    assert!(env
        .verdicts
        .iter()
        .all(|v| v.passed && !v.invariant.is_empty() && !v.resolution.is_empty()));
}

#[test]
fn catenoid_audit_passes_with_equality_at_neck() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = minlap(
        &["audit", "--surface", "catenoid", "--base", "origin"],
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let env = envelope(dir.path());
    let verdict = env.payload["audit"]["audit"]["curvature_bound"].to_string();
    assert!(verdict.contains("equality"), "{verdict}");
    assert!(dir.path().join("audit_xi.csv").exists());
}

#[test]
fn neck_base_audit_exits_with_verdict_failure() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = minlap(
        &["audit", "--surface", "catenoid", "--base", "on-surface"],
        dir.path(),
    );
    assert_eq!(code, 2, "{text}");
    assert!(text.contains("FAIL curvature_bound"), "{text}");
}

#[test]
fn weyl_residual_ratio_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = minlap(
        &[
            "weyl",
            "--surface",
            "plane",
            "--lambda",
            "1",
            "--m-max",
            "3",
        ],
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let ratio = csv_column(&dir.path().join("weyl.csv"), "residual_ratio");
    assert_eq!(ratio.len(), 3);
    assert!(ratio.windows(2).all(|w| w[1] < w[0]), "{ratio:?}");
}

#[test]
fn bdgg_exports_values_and_probe() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        serde_json::json!({ "bdgg": { "m": 4, "radius": 3.0, "resolution": 12 } }),
    );
    let out = dir.path().join("out");
    let (code, text) = minlap(&["bdgg", "--config", &cfg], &out);
    assert_eq!(code, 0, "{text}");
    let u = csv_column(&out.join("bdgg.csv"), "u");
    let f = csv_column(&out.join("bdgg.csv"), "f");
    assert!(!u.is_empty() && u.len() == f.len());
    assert!(out.join("bdgg_probe.csv").exists());
    assert_eq!(envelope(&out).config.bdgg.resolution, 12);
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = minlap(&["volume", "--surface", "torus"], dir.path());
    assert_eq!(code, 1, "{text}");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({ "radii": [1.0, 2.0], "nonsense": 3 }),
    );
    assert_eq!(minlap(&["volume", "--config", &cfg], dir.path()).0, 1);
    assert_eq!(minlap(&["volume", "--radii", "1:2"], dir.path()).0, 1);
}

#[test]
fn identical_config_gives_identical_payload() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "volume",
        "--surface",
        "catenoid",
        "--base",
        "origin",
        "--radii",
        "1:20:5",
    ];
    assert_eq!(minlap(&args, a.path()).0, 0);
    assert_eq!(minlap(&args, b.path()).0, 0);
    let (ea, eb) = (envelope(a.path()), envelope(b.path()));
    assert_eq!(
        serde_json::to_string(&ea.payload).unwrap(),
        serde_json::to_string(&eb.payload).unwrap()
    );
    assert_eq!(ea.verdicts, eb.verdicts);
    assert_eq!(
        std::fs::read(a.path().join("volume.csv")).unwrap(),
        std::fs::read(b.path().join("volume.csv")).unwrap()
    );
}

#[test]
fn flags_override_config_and_envelope_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        radii: vec![1.0, 2.0, 3.0, 4.0],
        ..RunConfig::default()
    };
    let path = write_config(dir.path(), serde_json::to_value(&cfg).unwrap());
    let (code, text) = minlap(
        &["volume", "--config", &path, "--radii", "2:6:3"],
        dir.path(),
    );
    assert_eq!(code, 0, "{text}");
    let env = envelope(dir.path());
    assert_eq!(env.config.radii, vec![2.0, 4.0, 6.0]);
    let again: ReportEnvelope =
        serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
    assert_eq!(again, env);
}

#[test]
fn export_mesh_writes_off_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        serde_json::json!({ "spectrum": { "radii": [1.0, 2.0], "resolution": 12 } }),
    );
    let out = dir.path().join("out");
    let (code, text) = minlap(&["spectrum", "--config", &cfg, "--export-mesh"], &out);
    assert!(code == 0 || code == 2, "{text}");
    let off = std::fs::read_to_string(out.join("mesh_r1.off")).unwrap();
    assert!(off.starts_with("OFF"));
    assert!(out.join("mesh_r2.off").exists());
    assert_eq!(csv_column(&out.join("spectrum.csv"), "r").len(), 2);
}

#[test]
fn range_parsing() {
    assert_eq!(
        parse_range("1:10:10").unwrap(),
        (1..=10).map(f64::from).collect::<Vec<_>>()
    );
    assert_eq!(parse_range("2:2:1").unwrap(), vec![2.0]);
    assert!(parse_range("1:10").is_err());
    assert!(parse_range("a:1:3").is_err());
    assert!(parse_range("1:2:0").is_err());
}

#[test]
fn default_config_round_trips() {
    let cfg = RunConfig::default();
    let back: RunConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}
