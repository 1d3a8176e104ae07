//! End-to-end runs of the `magic-mps` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn magic_mps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magic-mps")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = magic_mps(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Data rows of a CSV report as maps from column name to cell.
fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect()
}

fn cell<'a>(row: &'a [(String, String)], name: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == name).unwrap_or_else(|| panic!("no column {name}")).1
}

#[test]
fn zero_state_records() {
    let text = ok(&["sample", "--state", "zero", "--n", "8", "--samples", "100"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 100);
    let expected = -8.0 * std::f64::consts::LN_2;
    for line in lines {
        let (s, lp) = line.split_once('\t').unwrap();
        assert_eq!(s.len(), 8);
        assert!(s.chars().all(|c| c == 'I' || c == 'Z'), "{s}");
        assert!((lp.parse::<f64>().unwrap() - expected).abs() < 1e-12);
    }
}

#[test]
fn scrambled_t_state_sidecar_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let args = |out: &Path| {
        vec![
            "sample".to_string(),
            "--state".into(),
            "tstate".into(),
            "--phi".into(),
            "0.7854".into(),
            "--n".into(),
            "10".into(),
            "--clifford-depth".into(),
            "10".into(),
            "--samples".into(),
            "10000".into(),
            "--seed".into(),
            "5".into(),
            "--out".into(),
            path_str(out).into(),
        ]
    };
    for out in [&a, &b] {
        let argv = args(out);
        ok(&argv.iter().map(String::as_str).collect::<Vec<_>>());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let sidecar: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.txt.json")).unwrap()).unwrap();
    assert!(sidecar["run"]["chi"].as_u64().unwrap() > 1);
    assert_eq!(sidecar["run"]["seed"], 5);
    assert_eq!(sidecar["run"]["n_samples"], 10000);
    assert!(sidecar["run"]["sample_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(sidecar["config"]["n_sites"], 10);
    assert!(sidecar["version"].is_string());
}

#[test]
fn determinism_independent_of_worker_count() {
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_magic-mps"))
            .args(["sample", "--state", "random", "--n", "12", "--chi-max", "8", "--samples", "2000", "--seed", "9"])
            .env("MAGIC_MPS_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn estimate_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let zero = dir.path().join("zero.txt");
    ok(&["sample", "--state", "zero", "--n", "6", "--samples", "200", "--out", path_str(&zero)]);
    let rows = csv_rows(&ok(&["estimate", "--input", path_str(&zero), "--renyi", "1,2"]));
    assert_eq!(rows.len(), 2);
    for row in &rows {
        assert_eq!(cell(row, "m_density").parse::<f64>().unwrap(), 0.0);
        assert_eq!(cell(row, "std_error").parse::<f64>().unwrap(), 0.0);
    }

    let t = dir.path().join("t.txt");
    ok(&["sample", "--state", "tstate", "--phi", "0.7853981633974483", "--n", "10", "--clifford-depth", "10", "--out", path_str(&t)]);
    let rows = csv_rows(&ok(&["estimate", "--input", path_str(&t), "--renyi", "1,2"]));
    let n2 = rows.iter().find(|r| cell(r, "renyi_n").parse::<f64>().unwrap() == 2.0).unwrap();
    let m = cell(n2, "m_density").parse::<f64>().unwrap();
    let dm = cell(n2, "std_error").parse::<f64>().unwrap();
    assert!((m - (4.0f64 / 3.0).ln()).abs() <= 3.0 * dm, "{m} ± {dm}");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_eq!(magic_mps(&["estimate", "--input", path_str(&missing)]).status.code(), Some(4));
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "").unwrap();
    assert_eq!(magic_mps(&["estimate", "--input", path_str(&empty)]).status.code(), Some(2));
    let garbage = dir.path().join("garbage.txt");
    fs::write(&garbage, "IXQ\t-1.0\n").unwrap();
    assert_eq!(magic_mps(&["estimate", "--input", path_str(&garbage)]).status.code(), Some(4));
    assert_eq!(magic_mps(&["sample", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(magic_mps(&["estimate", "--input", path_str(&empty), "--renyi", "0.5"]).status.code(), Some(2));
    let unwritable = dir.path().join("no/such/dir/out.txt");
    assert_eq!(magic_mps(&["sample", "--n", "4", "--samples", "5", "--out", path_str(&unwritable)]).status.code(), Some(4));
}

#[test]
fn config_file_precedence_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    fs::write(&config, r#"{"n_sites": 5, "n_samples": 30, "seed": 1, "state": "zero"}"#).unwrap();
    let text = ok(&["sample", "--config", path_str(&config), "--n", "7"]);
    assert_eq!(text.lines().count(), 30);
    assert!(text.lines().all(|l| l.split('\t').next().unwrap().len() == 7));

    fs::write(&config, r#"{"n_sites": 5, "colour": "blue"}"#).unwrap();
    assert_eq!(magic_mps(&["sample", "--config", path_str(&config)]).status.code(), Some(2));
}

#[test]
fn reports_embed_provenance() {
    let csv = ok(&["tstate-bench", "--n", "4", "--samples", "300", "--seed", "2"]);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# magic-mps "));
    let config: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# config: ").unwrap()).unwrap();
    assert_eq!(config["n_sites"], 4);
    assert_eq!(config["experiment"], "tstate-bench");
    let rows = csv_rows(&csv);
    assert_eq!(rows.len(), 18);
    for row in rows.iter().filter(|r| cell(r, "phi").parse::<f64>().unwrap() == 0.0) {
        assert_eq!(cell(row, "m_analytic").parse::<f64>().unwrap(), 0.0);
    }
    // 17 significant digits
    let phi = cell(&rows[2], "phi");
    assert_eq!(phi.split('e').next().unwrap().replace(['.', '-'], "").len(), 17, "{phi}");

    let json: Value = serde_json::from_str(&ok(&["tstate-bench", "--n", "4", "--samples", "300", "--format", "json"])).unwrap();
    assert_eq!(json["config"]["format"], "json");
    assert_eq!(json["rows"].as_array().unwrap().len(), 18);
    assert_eq!(json["columns"].as_array().unwrap().len(), 8);
    assert!(json["version"].is_string());
}

#[test]
fn field_free_quench_keeps_zero_magic() {
    let rows = csv_rows(&ok(&["quench", "--n", "6", "--field-h", "0", "--field-g", "0", "--samples", "200", "--t-max", "1"]));
    assert!(!rows.is_empty());
    for row in &rows {
        for col in ["m1", "m2"] {
            assert!(cell(row, col).parse::<f64>().unwrap().abs() < 1e-14);
        }
    }
}

#[test]
fn ground_state_limits() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("gs.json");
    fs::write(&config, r#"{"h_grid": [0.0, 100.0], "n_sites": 6, "n_samples": 2000}"#).unwrap();
    let rows = csv_rows(&ok(&["ground-state", "--config", path_str(&config)]));
    assert_eq!(rows.len(), 4);
    for row in &rows {
        let h = cell(row, "h").parse::<f64>().unwrap();
        assert_eq!(cell(row, "degenerate"), if h == 0.0 { "true" } else { "false" });
        if h == 100.0 {
            let m = cell(row, "m_density").parse::<f64>().unwrap();
            let dm = cell(row, "std_error").parse::<f64>().unwrap();
            assert!(m.abs() <= 3.0 * dm + 1e-12, "{m} ± {dm}");
        }
    }
}
