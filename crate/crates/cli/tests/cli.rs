use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn nctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctx"))
        .args(args)
        .env_remove("NCTX_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = nctx(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn noiseless_kcbs_report() {
    let v = json(&["kcbs", "--r1", "1", "--r2", "1"]);
    assert_eq!(v["witness"], "Violation");
    assert!((v["corr"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["r_value"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["invariants"]["alpha"], "2");
    assert_eq!(v["invariants"]["alpha_star"], "5/2");
    assert_eq!(v["invariants"]["beta"], "1/2");
    let text = String::from_utf8(nctx(&["kcbs", "--r1", "1", "--r2", "1"]).stdout).unwrap();
    assert!(text.contains("R      = 2.23607"));
    assert!(text.contains("verdict: Violation"));
}

#[test]
fn cega_table() {
    let v = json(&["cega"]);
    let rows: Vec<(String, String, String)> = v["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            let s = |k: &str| r[k].as_str().unwrap().to_string();
            (s("C"), s("CE1"), s("G"))
        })
        .collect();
    let want = [("8", "9", "9"), ("1", "1", "3/2"), ("9", "10", "21/2")];
    for (got, want) in rows.iter().zip(want) {
        assert_eq!((got.0.as_str(), got.1.as_str(), got.2.as_str()), want);
    }
    assert_eq!(v["ks_colourable_18"], false);
    assert_eq!(v["ks_colourable_27"], true);
}

#[test]
fn non_sperner_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "bad.json",
        r#"{"vertices": ["a", "b", "c"], "hyperedges": [["a", "b"], ["a", "b", "c"]]}"#,
    );
    let out = nctx(&["analyze", &f]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Sperner"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(nctx(&["kcbs", "sweep", "--steps", "1"]).status.code(), Some(1));
    assert_eq!(nctx(&["kcbs", "--r1", "1.5"]).status.code(), Some(1));
    assert_eq!(nctx(&["analyze", "no_such_library"]).status.code(), Some(1));
    assert_eq!(nctx(&["--format", "yaml", "fcf"]).status.code(), Some(1));
}

#[test]
fn sweep_boundary_straddles_threshold() {
    let out = nctx(&["--format", "csv", "kcbs", "sweep", "--steps", "11", "--from", "0.9", "--to", "0.92"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r1,r2,corr,R,lhs,verdict"));
    let rows: Vec<(f64, String)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let r1: f64 = f[0].parse().unwrap();
            let r2: f64 = f[1].parse().unwrap();
            (r1 * r2, f[5].to_string())
        })
        .collect();
    assert_eq!(rows.len(), 11);
    let flips: Vec<usize> = (1..rows.len()).filter(|&k| rows[k].1 != rows[k - 1].1).collect();
    assert_eq!(flips.len(), 1);
    let k = flips[0];
    assert_eq!(rows[k - 1].1, "NoViolation");
    assert_eq!(rows[k].1, "Violation");
    let threshold = 1.0 - (5f64.sqrt() - 2.0) / (5f64.sqrt() + 1.0 / 3.0);
    assert!(rows[k - 1].0 < threshold && threshold < rows[k].0);
}

#[test]
fn fcf_reproduction() {
    let v = json(&["fcf"]);
    assert_eq!(v["bound"]["value"], "5/6");
    assert_eq!(v["bound"]["vertex"], serde_json::json!(["1", "1/2", "0"]));
    assert!((v["quantum_corr"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["violation"], true);
}

#[test]
fn invariants_with_q_override() {
    let v = json(&["invariants", "kcbs_g", "--q", "1/2,1/8,1/8,1/8,1/8"]);
    assert_eq!(v["beta"], "1/2");
    let out = nctx(&["invariants", "kcbs_g", "--q", "1,1,0,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

fn pr_box_model(dir: &Path) -> String {
    write(
        dir,
        "pr.json",
        r#"{"scenario": "chsh_4cycle", "probabilities": {
            "v1": "1/2", "v2": "1/2", "v3": "1/2", "v4": "1/2",
            "nd:v1,v2": 0, "nd:v1,v4": 0, "nd:v2,v3": 0, "nd:v3,v4": 0}}"#,
    )
}

#[test]
fn certify_pr_box_on_four_cycle() {
    let dir = tempfile::tempdir().unwrap();
    let m = pr_box_model(dir.path());
    let v = json(&["certify", "chsh_4cycle", &m]);
    assert_eq!(v["certificate"]["verdict"], "NoViolation");
    assert_eq!(v["certificate"]["r_bound"], "2");
    assert_eq!(v["classes"]["classical"], true);
    assert!((v["realized"]["r_value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let m = pr_box_model(dir.path());
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = nctx(&["--format", "json", "--seed", "5", "-o", p.to_str().unwrap(), "certify", "chsh_4cycle", &m]);
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let env = Command::new(env!("CARGO_BIN_EXE_nctx"))
        .args(["--format", "json", "certify", "chsh_4cycle", &m])
        .env("NCTX_SEED", "5")
        .output()
        .unwrap();
    assert_eq!(env.stdout, std::fs::read(&a).unwrap());
}

#[test]
fn analyze_library_and_table_export() {
    let out = nctx(&["analyze", "cega_18"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("KS-colourable: no"));
    assert!(text.contains("structural Specker: violated"));
    let out = nctx(&["--format", "csv", "kcbs", "--table"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("hyperedge,m,s,probability"));
    assert!(csv.contains("star_vertex,s,probability"));
}
