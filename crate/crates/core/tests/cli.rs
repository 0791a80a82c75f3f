//! Command-line behaviour: artifacts, line-anchored validation errors, exit codes.

use std::path::Path;
use std::process::{Command, Output};

const SMALL: &str = r#"config_version = 1
name = "small"

[geometry]
rectangle = [0.0, 0.0, 2.0, 2.0]
crack = [[0.0, 1.0], [0.9, 1.0]]

[mesh]
kind = "quad"
nx = 10
ny = 11

[material]
model = "neo-hookean-ps"
mu = 1.0e5

[loading]
n_steps = 3
supports = [{ set = "bottom", fix = "y" }, { set = "bottom_left", fix = "xy" }]
loads = [{ set = "top", traction = [0.0, 2000.0] }]

[fracture]
cell_size = 0.2
"#;

fn polyxfem(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyxfem"))
        .args(args)
        .env("POLYXFEM_OUTPUT_ROOT", root)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn write_config(dir: &Path, name: &str, src: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, src).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.cfg", SMALL);
    let out = polyxfem(tmp.path(), &["run", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dir = tmp.path().join("small");
    for f in [
        "mesh.txt",
        "mesh.vtk",
        "config.toml",
        "solver.csv",
        "j.csv",
        "sif.csv",
        "step_0003.vtk",
        "summary.json",
    ] {
        assert!(dir.join(f).is_file(), "{f} missing");
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["status"], "ok");
    assert_eq!(summary["steps_completed"], 3);
    assert!(summary["final_j"].as_f64().unwrap() > 0.0);
    let j = std::fs::read_to_string(dir.join("j.csv")).unwrap();
    assert_eq!(j.lines().count(), 4);
    assert!(j.starts_with("step,load,J\n1,2000,"));
}

#[test]
fn vtk_header_is_legacy_polydata() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "small.cfg", SMALL);
    assert_eq!(
        polyxfem(tmp.path(), &["mesh-only", &cfg]).status.code(),
        Some(0)
    );
    let text = std::fs::read_to_string(tmp.path().join("small/mesh.vtk")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[..5],
        [
            "# vtk DataFile Version 3.0",
            "small",
            "ASCII",
            "DATASET POLYDATA",
            "POINTS 132 double"
        ]
    );
    assert!(lines.contains(&"POLYGONS 110 550"));
}

#[test]
fn invalid_config_exits_one_with_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "bad.cfg",
        &SMALL.replace("[[0.0, 1.0], [0.9, 1.0]]", "[[0.0, 1.0], [2.5, 1.0]]"),
    );
    let out = polyxfem(tmp.path(), &["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.cfg:6:"), "{err}");
    let out = polyxfem(
        tmp.path(),
        &["run", &tmp.path().join("missing.cfg").to_string_lossy()],
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solver_failure_exits_two_and_keeps_partial_results() {
    let tmp = tempfile::tempdir().unwrap();
    let src = SMALL
        .replace("traction = [0.0, 2000.0]", "traction = [0.0, 5.0e5]")
        .replace(
            "[fracture]",
            "[solver]\nmax_iter = 4\nbisection = false\n\n[fracture]",
        );
    let cfg = write_config(tmp.path(), "hard.cfg", &src);
    let out = polyxfem(tmp.path(), &["run", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = std::fs::read_to_string(tmp.path().join("small/summary.json")).unwrap();
    assert!(summary.contains("\"status\": \"failed\""));
}

#[test]
fn patch_test_writes_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = polyxfem(tmp.path(), &["patch-test", "--elems", "10,50"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("patch_test.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "elements,l2_with,h1_with,l2_without,h1_without");
    assert_eq!(rows.len(), 3);
}
