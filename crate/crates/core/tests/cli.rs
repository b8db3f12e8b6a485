use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_twomedian")).args(args).output().unwrap();
    let report: Value = serde_json::from_slice(&out.stdout).expect("JSON report on stdout");
    (out.status.code().unwrap(), report)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twomedian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn square_median_is_the_centre() {
    let (plane, sq) = (data("plane.json"), data("square.json"));
    let (code, r) = run(&["median2", "--complex", plane.to_str().unwrap(), "--points", sq.to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["kind"], "point");
    assert_eq!(r["result"]["location"]["carrier"]["id"], "1_1");
}

#[test]
fn cone_fails_the_link_condition() {
    let cone = data("cone.json");
    let (code, r) = run(&["check-cat0", "--complex", cone.to_str().unwrap()]);
    assert_eq!(code, 2);
    let f = &r["result"]["diagnostics"]["link_failures"][0];
    assert_eq!(f["vertex"], "apex");
    assert!((f["girth"].as_f64().unwrap() - 1.5 * std::f64::consts::PI).abs() < 1e-7);
}

#[test]
fn bad_input_exits_with_two() {
    let (code, r) = run(&["geodesic", "--complex", "/nonexistent/complex.json"]);
    assert_eq!(code, 2);
    assert!(r["error"].as_str().unwrap().contains("cannot read"));
    let plane = data("plane.json");
    let tri = data("triangle.json");
    let (code, _) = run(&["median2", "--complex", plane.to_str().unwrap(), "--points", tri.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn results_and_pictures_are_deterministic() {
    let (plane, tri) = (data("plane.json"), data("triangle.json"));
    let mut files = Vec::new();
    for k in 0..2 {
        let (out, svg) = (tmp(&format!("disc{k}.json")), tmp(&format!("disc{k}.svg")));
        let (code, _) = run(&[
            "fill-disc",
            "--complex",
            plane.to_str().unwrap(),
            "--points",
            tri.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        files.push((std::fs::read(out).unwrap(), std::fs::read(svg).unwrap()));
    }
    assert_eq!(files[0], files[1]);
    assert!(String::from_utf8_lossy(&files[0].1).contains("<polygon"));
}

#[test]
fn seeded_gauss_bonnet_audit_passes() {
    let plane = data("tripod_interval.json");
    let (code, r) = run(&["audit-gb", "--complex", plane.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(code, 0);
    assert!(r["result"]["location"]["worst_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn tetra_verification_on_tripod_interval() {
    let (c, p) = (data("tripod_interval.json"), data("tripod_quadruple.json"));
    let (code, r) = run(&["tetra-verify", "--complex", c.to_str().unwrap(), "--points", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["location"]["conclusions_ok"], true);
}

#[test]
fn data_files_round_trip() {
    for entry in std::fs::read_dir(data("")).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        let again = if value.get("points").is_some() || value.is_array() {
            twomedian::io::to_json(&twomedian::io::PointFile { points: twomedian::io::parse_points(&text).unwrap() })
        } else {
            twomedian::io::to_json(&twomedian::io::parse_complex(&text).unwrap())
        };
        let strip = |s: &str| s.split_whitespace().collect::<String>();
        assert_eq!(strip(&again), strip(&text), "{}", path.display());
    }
}
