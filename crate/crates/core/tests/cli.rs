//! End-to-end runs of the `gf2shor` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn gf2shor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gf2shor"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gf2shor-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn synth_reports_counts_as_json() {
    let o = gf2shor(&["synth", "--field", "163", "--target", "modmult", "--counts-only"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["counts"]["toffoli"], 999);
    assert_eq!(v["n"], 163);
}

#[test]
fn emitted_circuit_validates_and_corruption_is_caught() {
    let dir = scratch("emit");
    let path = dir.join("inv.txt");
    let p = path.to_str().unwrap();
    let o = gf2shor(&["synth", "--field", "4", "--target", "inversion", "--emit", p]);
    assert!(o.status.success());
    let o = gf2shor(&["validate", "--field", "4", "--target", "inversion", "--circuit", p]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS inversion n=4"));

    let text = std::fs::read_to_string(&path).unwrap();
    let first_cnot = text.lines().position(|l| l.starts_with("CNOT")).unwrap();
    let broken: Vec<&str> = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == first_cnot { "X q[0]" } else { l })
        .collect();
    std::fs::write(&path, broken.join("\n") + "\n").unwrap();
    let o = gf2shor(&["validate", "--field", "4", "--target", "inversion", "--circuit", p]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("FAIL") && out.contains("expected") && out.contains("got"));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn builtin_validation_suite_passes() {
    let o = gf2shor(&["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("PASS ecpointadd")));
    assert!(!out.contains("FAIL"));
}

#[test]
fn exhaustive_cap_is_enforced() {
    let o = gf2shor(&["validate", "--field", "16", "--target", "modmult", "--cap", "20"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sampled"));
}

#[test]
fn landscape_csv_has_minimum_at_thirteen() {
    let o = gf2shor(&["landscape", "--field", "163", "--range", "10:16", "--toffoli-source", "decomposition"]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["s", "toffoli", "active_volume"]);
    let rows: Vec<(usize, f64)> = rdr
        .records()
        .map(|r| {
            let r = r.unwrap();
            (r[0].parse().unwrap(), r[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 7);
    let best = rows.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(best.0, 13);
}

#[test]
fn estimate_writes_csv_and_json() {
    let dir = scratch("estimate");
    let csv_path = dir.join("est.csv");
    let o = gf2shor(&[
        "estimate",
        "--field",
        "163",
        "--arch",
        "baseline",
        "--precomp",
        "0",
        "--cycle",
        "1e-6",
        "--toffoli-source",
        "decomposition",
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["s"], 13);
    assert_eq!(v[0]["d"], 24);
    assert_eq!(v[0]["logical_qubits"], 2126);
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 2);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn errors_exit_with_code_two() {
    let o = gf2shor(&["estimate", "--field", "163", "--weights", "/nonexistent/weights.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = gf2shor(&["synth", "--field", "1", "--target", "modmult"]);
    assert_eq!(o.status.code(), Some(2));
}
