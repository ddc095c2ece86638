use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nonsaddle::flow::load_flow_spec;
use nonsaddle::mesh::read_mesh;
use nonsaddle::verify::AnalysisReport;

fn nonsaddle(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonsaddle")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn generate_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsaddle(dir.path(), &["generate", "2", "1,1", "--out", "g2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let off = fs::read_to_string(dir.path().join("g2.off")).unwrap();
    let side = fs::read_to_string(dir.path().join("g2.sidecar")).unwrap();
    let (m, subs) = read_mesh(&off, &side).unwrap();
    assert_eq!(m.euler_characteristic(), -2);

    let fx = load_flow_spec(&dir.path().join("g2.flow.json")).unwrap();
    assert_eq!(m.canonical_hash(), fx.surface.canonical_hash());
    assert_eq!(subs["K"], fx.k);
}

#[test]
fn generate_rejects_bad_partitions_and_accepts_the_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsaddle(dir.path(), &["generate", "2", "1"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("partition"));

    let o = nonsaddle(dir.path(), &["generate", "0", "", "--out", "s"]);
    assert_eq!(code(&o), 0);
    let off = fs::read_to_string(dir.path().join("s.off")).unwrap();
    let side = fs::read_to_string(dir.path().join("s.sidecar")).unwrap();
    assert_eq!(read_mesh(&off, &side).unwrap().0.euler_characteristic(), 2);
}

#[test]
fn analyze_is_deterministic_and_verify_sets_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["analyze", "generator", "--g", "1", "--ks", "1"];
    let a = nonsaddle(dir.path(), &args);
    let b = nonsaddle(dir.path(), &args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let report = AnalysisReport::from_json(std::str::from_utf8(&a.stdout).unwrap()).unwrap();
    assert_eq!(report.influence.complexity, 1);
    fs::write(dir.path().join("r.json"), &a.stdout).unwrap();
    assert_eq!(code(&nonsaddle(dir.path(), &["verify", "r.json"])), 0);

    let mut bad = report;
    bad.influence.complexity += 1;
    fs::write(dir.path().join("bad.json"), bad.to_json()).unwrap();
    let o = nonsaddle(dir.path(), &["verify", "bad.json"]);
    assert_eq!(code(&o), 1);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("check_genus_bound") && out.contains("\"fail\""));

    assert_eq!(code(&nonsaddle(dir.path(), &["verify", "no-such-fixture"])), 2);
    assert_eq!(code(&nonsaddle(dir.path(), &["verify", "generator", "--coeff", "q"])), 2);
}

#[test]
fn sphere_fixture_has_complexity_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsaddle(dir.path(), &["analyze", "generator", "--g", "0", "--coeff", "z"]);
    assert_eq!(code(&o), 0);
    let r = AnalysisReport::from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(r.influence.complexity, 0);
    assert_eq!(r.cohomology.len(), 2);
}

#[test]
fn sweep_of_one_point_without_probe() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsaddle(dir.path(), &["sweep", "sphere-circle", "--lambda-grid", "0", "--depth", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    let cols = v["columns"].as_array().unwrap();
    assert_eq!(cols.len(), 1);
    assert_eq!(cols[0]["rchar"], true);
    assert!(cols[0]["saddle_probe"].is_null());
    assert!(v["notes"].as_array().unwrap().iter().any(|n| n.as_str().unwrap().contains("probe")));

    assert_eq!(code(&nonsaddle(dir.path(), &["sweep", "no-family"])), 2);
}

#[test]
fn render_draws_the_saddle_and_its_separatrices() {
    let dir = tempfile::tempdir().unwrap();
    let o = nonsaddle(dir.path(), &["analyze", "example2", "--out", "e2.json"]);
    assert_eq!(code(&o), 0);
    let args = ["render", "example2", "--report", "e2.json", "--seed-count", "40"];
    let a = nonsaddle(dir.path(), &args);
    let b = nonsaddle(dir.path(), &args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let svg = String::from_utf8(a.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"stroke="black" stroke-width="2""#).count(), 1, "one saddle glyph");
    let separatrices = svg.split(r##"stroke="#b2401c" stroke-width="1.4">"##).nth(1).unwrap();
    let separatrices = &separatrices[..separatrices.find("</g>").unwrap()];
    assert!(separatrices.matches("<polyline").count() >= 4);

    let plain = nonsaddle(dir.path(), &["render", "example2"]);
    assert_eq!(code(&plain), 0);
    assert!(!String::from_utf8(plain.stdout).unwrap().contains("<polyline"));
}
