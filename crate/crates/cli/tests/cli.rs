use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn radii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radii"))
        .args(args)
        .env("RADII_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const NILPOTENT: &str = r#"{"rows":2,"cols":2,"data":[[[0,0],[1,0]],[[0,0],[0,0]]]}"#;
const GENERIC: &str = r#"{"rows":3,"cols":3,"data":[[[1,0.5],[-0.3,0.2],[0.7,0]],[[0.1,-1],[0,0],[2,0.25]],[[-0.6,0.4],[0.9,-0.1],[0.3,0.3]]]}"#;

fn scalar(args: &[&str]) -> f64 {
    let o = radii(args);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o).trim().parse().unwrap()
}

#[test]
fn compute_prints_documented_values() {
    let d = TempDir::new().unwrap();
    let nil = write(d.path(), "nil.json", NILPOTENT);
    let nil = nil.to_str().unwrap();
    let o = radii(&["compute", "--input", nil, "--functional", "w"]);
    assert_eq!(stdout(&o), "0.500000000000\n");
    let o = radii(&["compute", "--input", nil, "--functional", "wrho", "--rho", "0.5"]);
    assert_eq!(stdout(&o), "2.000000000000\n");
    assert_eq!(scalar(&["compute", "--input", nil, "--functional", "spectral-radius"]), 0.0);
    assert_eq!(scalar(&["compute", "--input", nil, "--functional", "crawford"]), 0.0);

    let g = write(d.path(), "g.json", GENERIC);
    let g = g.to_str().unwrap();
    let norm = scalar(&["compute", "--input", g, "--functional", "norm"]);
    for nu in ["0", "0.3", "1"] {
        let v = scalar(&["compute", "--input", g, "--functional", "delta", "--rho", "1", "--nu", nu]);
        let mu: f64 = 1.0 - 2.0 * nu.parse::<f64>().unwrap();
        assert!((v - (1.0 + mu.abs()) * norm).abs() < 1e-10, "nu {nu}: {v}");
    }
}

#[test]
fn compute_matrix_outputs() {
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "g.json", GENERIC);
    let out = d.path().join("h.json");
    let o = radii(&[
        "compute", "--input", g.to_str().unwrap(), "--functional", "blocks", "--rho", "0.5", "--nu", "0.25", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let h: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(h["rows"], 6);
    assert_eq!(h["cols"], 6);
    // The block's numerical radius is Δ.
    let w = scalar(&["compute", "--input", out.to_str().unwrap(), "--functional", "w"]);
    let delta = scalar(&["compute", "--input", g.to_str().unwrap(), "--functional", "delta", "--rho", "0.5", "--nu", "0.25"]);
    assert!((w - delta).abs() < 1e-10);

    let o = radii(&["compute", "--input", g.to_str().unwrap(), "--functional", "aluthge"]);
    assert!(o.status.success());
    let a: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(a["data"].as_array().unwrap().len(), 3);
}

#[test]
fn input_errors_exit_2_and_name_the_field() {
    let d = TempDir::new().unwrap();
    let cases = [
        (r#"{"rows":2,"cols":2,"data":[[[0,0],[1,0]]]}"#, "data:"),
        (r#"{"rows":1,"cols":2,"data":[[[0,0],[1,0,3]]]}"#, "matrix file"),
        (r#"{"rows":1,"data":[[[0,0]]]}"#, "cols"),
        (r#"{"rows":1,"cols":2,"data":[[[0,0],[1,0]]]}"#, "square"),
        ("not json", "matrix file"),
    ];
    for (i, (text, needle)) in cases.iter().enumerate() {
        let p = write(d.path(), &format!("bad{i}.json"), text);
        let o = radii(&["compute", "--input", p.to_str().unwrap(), "--functional", "w"]);
        assert_eq!(o.status.code(), Some(2), "case {i}");
        let e = stderr(&o);
        assert_eq!(e.lines().count(), 1, "{e}");
        assert!(e.contains(needle), "case {i}: {e}");
    }
    let p = write(d.path(), "nil.json", NILPOTENT);
    let o = radii(&["compute", "--input", p.to_str().unwrap(), "--functional", "wrho"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho"));
    let o = radii(&["compute", "--input", "/nonexistent/x.json", "--functional", "w"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let o = radii(&["check", "--rho", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho out of range (0,2]"), "{}", stderr(&o));
    assert_eq!(radii(&["check", "--nu", "1.5", "--ensemble"]).status.code(), Some(2));
    assert_eq!(radii(&["check", "--only", "T9.9", "--ensemble"]).status.code(), Some(2));
    assert_eq!(radii(&["check", "--dims", "1", "--ensemble"]).status.code(), Some(2));
    assert_eq!(radii(&["check"]).status.code(), Some(2));
    let o = radii(&["check", "--ensemble", "--coarse-points", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_radii"))
        .args(["check", "--ensemble"])
        .env("RADII_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    // A tolerance below roundoff turns a tight equality into a violation.
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "g.json", GENERIC);
    let g = g.to_str().unwrap();
    let ok = radii(&["check", "--input", g, "--only", "T2.5.vii-sym", "--rho-grid", "0.5,1.5"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let bad = radii(&[
        "check", "--input", g, "--only", "T2.5.vii-sym", "--rho-grid", "0.5,1.5", "--tol-ineq", "1e-300",
    ]);
    assert_eq!(bad.status.code(), Some(1), "{}", stderr(&bad));
    assert!(stderr(&bad).contains("FAIL T2.5.vii-sym"));
    let r: serde_json::Value = serde_json::from_str(&stdout(&bad)).unwrap();
    assert_eq!(r["pass"], false);
    let ws = r["checks"][0]["worst_witnesses"].as_array().unwrap();
    assert!(!ws.is_empty() && ws[0]["family"] == "input");
}

#[test]
fn check_input_equality_case() {
    let d = TempDir::new().unwrap();
    let p = write(d.path(), "nil.json", NILPOTENT);
    let out = d.path().join("report.json");
    let o = radii(&["check", "--input", p.to_str().unwrap(), "--only", "C2.7.b", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["pass"], true);
    let c = &r["checks"][0];
    assert_eq!(c["id"], "C2.7.b");
    assert!(c["min_slack"].as_f64().unwrap().abs() <= c["tolerance"].as_f64().unwrap());
}

#[test]
fn check_input_runs_every_check() {
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "g.json", GENERIC);
    let o = radii(&["check", "--input", g.to_str().unwrap(), "--rho-grid", "0.25,1,2", "--nu-grid", "0,0.5,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 29);
    for c in checks {
        // The structural oracles only apply to nilpotent or normal inputs.
        let structural = c["id"] == "O.nilpotent" || c["id"] == "O.normal";
        assert_eq!(c["count"].as_u64().unwrap() == 0, structural, "{}", c["id"]);
    }
}

#[test]
fn search_is_deterministic_and_sorted() {
    let d = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = d.path().join(name);
        let o = radii(&[
            "search", "--seed", "7", "--families", "ginibre,nilpotent2", "--dims", "2,3", "--samples", "2", "--rho-grid",
            "0.5,2", "--nu-grid", "0,0.5", "--worst", "3", "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        std::fs::read(out).unwrap()
    };
    let (a, b) = (run("a.json"), run("b.json"));
    assert_eq!(a, b);
    let r: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(r["master_seed"], 7);
    for c in r["checks"].as_array().unwrap() {
        let ws = c["worst_witnesses"].as_array().unwrap();
        if c["id"] == "O.normal" {
            // Neither family is normal.
            assert!(ws.is_empty());
            continue;
        }
        assert!(!ws.is_empty() && ws.len() <= 3, "{}", c["id"]);
        let slacks: Vec<f64> = ws.iter().map(|w| w["slack"].as_f64().unwrap()).collect();
        assert!(slacks.windows(2).all(|p| p[0] <= p[1]), "{}: {slacks:?}", c["id"]);
        assert!(ws[0]["seed"].is_u64() && ws[0]["family"].is_string());
    }
}

#[test]
fn search_equality_family_and_validation() {
    let o = radii(&["search", "--families", "nilpotent2", "--only", "C2.7.b", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["checks"][0]["min_slack"].as_f64().unwrap().abs() < 1e-9);
    let o = radii(&["search", "--families", "unknown"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("families"));
}

fn sweep_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

#[test]
fn sweep_schema_and_identities() {
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "g.json", GENERIC);
    let out = d.path().join("sweep.csv");
    let o = radii(&[
        "sweep", "--input", g.to_str().unwrap(), "--rho-grid", "0.25:1.75:0.25", "--nu-grid", "0:1:0.25", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "rho,nu,delta,spectral_norm,numerical_radius,w_rho");
    let rows = sweep_rows(&text);
    assert_eq!(rows.len(), 7 * 5);
    for pair in rows.windows(2) {
        assert!((pair[0][0], pair[0][1]) < (pair[1][0], pair[1][1]));
    }
    let find = |rho: f64, nu: f64| {
        rows.iter()
            .find(|r| (r[0] - rho).abs() < 1e-9 && (r[1] - nu).abs() < 1e-9)
            .unwrap()
            .clone()
    };
    for r in &rows {
        assert!(r[2] >= 0.0);
        if (r[1] - 0.5).abs() < 1e-12 {
            assert!((r[2] - r[5]).abs() <= 1e-8, "{r:?}");
        }
        if (r[0] - 1.0).abs() < 1e-12 {
            assert!((r[2] - (1.0 + (1.0 - 2.0 * r[1]).abs()) * r[3]).abs() <= 1e-8, "{r:?}");
        }
        let m = find(2.0 - r[0], r[1]);
        // Printed values carry 12 decimals.
        assert!(((2.0 - r[0]) * m[2] - r[0] * r[2]).abs() <= 1e-9 * (1.0 + r[2]), "{r:?} vs {m:?}");
    }
}

#[test]
fn sweep_rejects_bad_ranges() {
    let d = TempDir::new().unwrap();
    let g = write(d.path(), "g.json", GENERIC);
    let g = g.to_str().unwrap();
    for (rho, nu, needle) in [
        ("0.5:1", "0", "rho-grid"),
        ("0.5:1:x", "0", "rho-grid"),
        ("0.00001:1:0.5", "0", "floor"),
        ("1:3:1", "0", "rho-grid"),
        ("1", "0:2:1", "nu-grid"),
    ] {
        let o = radii(&["sweep", "--input", g, "--rho-grid", rho, "--nu-grid", nu]);
        assert_eq!(o.status.code(), Some(2), "{rho} {nu}");
        assert!(stderr(&o).contains(needle), "{}", stderr(&o));
    }
}
