use std::fs;
use std::path::Path;
use std::process::Command;

use phased_mimo::beampattern::sidelobe_report;
use phased_mimo_cli::read_csv;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_phased-mimo"))
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn overall_patterns_ph_matches_mimo() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _, err) = run(&["beampattern", "--out", path(dir.path())]);
    assert!(ok, "{err}");
    let t = read_csv(&dir.path().join("beampattern_overall.csv")).unwrap();
    let ph = t.column("G_ph_db").unwrap();
    let mimo = t.column("G_mimo_db").unwrap();
    let phm = t.column("G_phmimo_db").unwrap();
    let theta = t.column("theta_deg").unwrap();
    for (a, b) in ph.iter().zip(&mimo) {
        assert!((a - b).abs() < 1e-6 || (*a < -250.0 && *b < -250.0), "{a} vs {b}");
    }
    let axis: Vec<f64> = theta.iter().map(|t| t.to_radians()).collect();
    let psl = |g: &[f64]| {
        let lin: Vec<f64> = g.iter().map(|v| 10f64.powf(v / 10.0)).collect();
        sidelobe_report(&axis, &lin, 10f64.to_radians()).peak_sidelobe_level
    };
    assert!(psl(&phm) < psl(&ph));
    for name in ["beampattern_ph", "beampattern_mimo", "beampattern_phmimo"] {
        let t = read_csv(&dir.path().join(format!("{name}.csv"))).unwrap();
        assert_eq!(t.columns, ["theta_deg", "C_db", "D_db", "R_db", "G_db"]);
    }
}

#[test]
fn verify_prop1_prints_ten_pass_lines() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, out, err) = run(&["verify-prop1", "--out", path(dir.path())]);
    assert!(ok, "{err}");
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 10);
    let t = read_csv(&dir.path().join("prop1.csv")).unwrap();
    assert!(t.column("max_abs_diff").unwrap().iter().all(|d| *d <= 1e-10));
}

#[test]
fn same_seed_same_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let (ok, _, err) = run(&["sinr-curve", "--runs", "30", "--seed", "42", "--out", path(d.path())]);
        assert!(ok, "{err}");
    }
    let fa = fs::read(a.path().join("sinr.csv")).unwrap();
    let fb = fs::read(b.path().join("sinr.csv")).unwrap();
    assert_eq!(fa, fb);
    let text = String::from_utf8(fa).unwrap();
    assert!(text.contains("# seed=42\n"));
}

#[test]
fn verify_hash_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let (ok, _, err) = run(&["hk-curves", "--out", path(dir.path())]);
    assert!(ok, "{err}");
    let file = dir.path().join("hk.csv");
    let (ok, out, _) = run(&["verify-hash", path(&file)]);
    assert!(ok && out.starts_with("ok "));
    let tampered = fs::read_to_string(&file).unwrap().replace("\"m_tx\":10", "\"m_tx\":11");
    fs::write(&file, tampered).unwrap();
    let (ok, _, err) = run(&["verify-hash", path(&file)]);
    assert!(!ok && err.contains("hash mismatch"), "{err}");
}

#[test]
fn config_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, r#"{"scenario": {"d_tx": 2.5}}"#).unwrap();
    let out = dir.path().join("out");
    let (ok, _, err) = run(&["beampattern", "--config", path(&cfg), "--grid-deg", "0.05", "--out", path(&out)]);
    assert!(ok, "{err}");
    let t = read_csv(&out.join("beampattern_ph.csv")).unwrap();
    assert!(t.metadata.config.contains("\"d_tx\":2.5"));
    assert!(t.metadata.config.contains("\"grid_deg\":0.05"));

    fs::write(&cfg, r#"{"scenario": {"k_subarrays": 0}}"#).unwrap();
    let bad = dir.path().join("bad");
    let (ok, _, err) = run(&["beampattern", "--config", path(&cfg), "--out", path(&bad)]);
    assert!(!ok && err.contains("k_subarrays"), "{err}");
    assert!(!bad.exists());
}

#[test]
fn print_config_shows_defaults() {
    let (ok, out, _) = run(&["print-config"]);
    assert!(ok);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["scenario"]["m_tx"], 10);
    assert_eq!(v["diagonal_load"], 10.0);
}
