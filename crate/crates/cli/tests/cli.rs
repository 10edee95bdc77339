use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

const TWO: &str = "0.25,0.3333333333333333,0.3333333333333333,1";
const THREE: &str = "0.5,0.5,0.3333333333333333,1";
const FAMILY: &str = "tau/2,tau/2,tau/3,tau";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_octabif")).args(args).output().expect("spawn octabif")
}

fn ok_json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn points_of(v: &Value) -> Vec<(f64, String)> {
    v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p["u"].as_f64().unwrap(), p["type"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn singular_two_stack() {
    let pts = points_of(&ok_json(&["singular", "--t", TWO, "--j", "2"]));
    assert_eq!(pts.len(), 2);
    let hyp: Vec<f64> = pts.iter().filter(|p| p.1 == "hyperbolic-regular").map(|p| p.0).collect();
    let ell: Vec<f64> = pts.iter().filter(|p| p.1 == "elliptic-regular").map(|p| p.0).collect();
    assert!(hyp.len() == 1 && (hyp[0] - 1.48116).abs() < 1e-3, "{pts:?}");
    assert!(ell.len() == 1 && (ell[0] + 1.66216).abs() < 1e-3, "{pts:?}");
}

#[test]
fn singular_csv_and_template() {
    let o = run(&["singular", "--t", FAMILY, "--tau", "0.3", "--j", "1.5", "--format", "csv"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("u,v,type"));
    assert!(lines.all(|l| l.split(',').count() >= 4));
}

#[test]
fn fibre_three_stack_files() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, summary, svg) = (dir.path().join("c.csv"), dir.path().join("s.json"), dir.path().join("f.svg"));
    let o = run(&[
        "fibre",
        "--t",
        THREE,
        "--j",
        "2",
        "--h",
        "auto",
        "--csv",
        csv.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = read_json(&summary);
    assert_eq!(s["vertices"].as_array().unwrap().len(), 2);
    assert_eq!(s["edges"].as_array().unwrap().len(), 4);
    assert_eq!(s["faces"], 4);
    assert_eq!(s["euler_defect"], 0);
    let ks: Vec<u64> = s["components"].as_array().unwrap().iter().filter_map(|c| c["k"].as_u64()).collect();
    assert!(ks.contains(&3), "{ks:?}");
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("component_id,polyline_id,u,v"));
    assert!(text.lines().count() > 10);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<svg"));
}

#[test]
fn fibre_auto_without_hyperbolic_point() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let o = run(&["fibre", "--t", TWO, "--j", "2.5", "--h", "auto", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!o.stderr.is_empty());
    let s: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(s["components"].as_array().unwrap().len(), 0);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1);
}

#[test]
fn bifurcation_csv() {
    let o = run(&["bifurcation", "--t", TWO, "--j-min", "0.1", "--j-max", "2.9", "--steps", "60"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("j,h,kind,source"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 60);
    assert!(rows.iter().any(|r| r.contains("hyperbolic")));
}

#[test]
fn sweep_rank_zero_transitions() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "sweep",
        "--family",
        FAMILY,
        "--tau-min",
        "0.05",
        "--tau-max",
        "1.5",
        "--diagrams",
        "2",
        "--j-steps",
        "60",
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&dir.path().join("transitions.json"));
    let taus: Vec<f64> = v["events"].as_array().unwrap().iter().map(|e| e["tau"].as_f64().unwrap()).collect();
    assert_eq!(taus.len(), 2, "{taus:?}");
    assert!((taus[0] - 25.0 / 69.0).abs() < 1e-6);
    assert!((taus[1] - 5.0 / 9.0).abs() < 1e-6);
    assert!(dir.path().join("diagram_0000.csv").exists());
    assert!(dir.path().join("diagrams.json").exists());
}

#[test]
fn sweep_semitoric_family() {
    let v = ok_json(&["sweep", "--family", "tau,0,0,0", "--tau-min", "0.05", "--tau-max", "1.5"]);
    let taus: Vec<f64> = v["events"].as_array().unwrap().iter().map(|e| e["tau"].as_f64().unwrap()).collect();
    assert_eq!(taus.len(), 2, "{taus:?}");
    assert!((taus[0] - 25.0 / 74.0).abs() < 1e-6);
    assert!((taus[1] - 25.0 / 26.0).abs() < 1e-6);
}

#[test]
fn classify_invariant_types() {
    let v = ok_json(&["classify-invariant", "--t", FAMILY, "--tau", "0.45"]);
    let p = &v["points"][0];
    assert!(p["name"].as_str().unwrap().starts_with("phi2"));
    assert_eq!(p["type"], "focus-focus");
    let v = ok_json(&["classify-invariant", "--t", FAMILY, "--tau", "0.3"]);
    assert_eq!(v["points"][0]["type"], "elliptic-elliptic");
}

#[test]
fn verify_passes_and_detects_mutation() {
    let v = ok_json(&["verify", "--samples", "40"]);
    assert_eq!(v["passed"], true);
    let o = run(&["verify", "--samples", "40", "--mutate", "gamma2-sign"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["singular", "--j", "2"]).status.code(), Some(1));
    assert_eq!(run(&["singular", "--t", "1,2,3", "--j", "2"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--samples", "0"]).status.code(), Some(1));
    assert_eq!(run(&["singular", "--t", TWO, "--j", "5"]).status.code(), Some(3));
    let o = run(&["singular", "--t", "0,1,1,1", "--j", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn output_is_deterministic() {
    let args = ["bifurcation", "--t", THREE, "--steps", "40"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["fibre", "--t", THREE, "--j", "2", "--h", "auto"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}
