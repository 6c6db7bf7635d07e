use std::path::PathBuf;
use std::process::{Command, Output};

use dirac_bounds_core::pipeline::Report;
use dirac_bounds_core::Family;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dirac-bounds"))
}

fn specs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn catalog_lists_entries() {
    let out = run(&["catalog"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in ["sphere", "torus", "product", "conformal_torus"] {
        assert!(text.contains(kind), "{kind} missing");
    }
    let out = run(&["catalog", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 5);
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sphere_report_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let spec = specs().join("sphere4.json");
    let out = run(&["analyze", spec.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    let report = Report::from_json(&text).unwrap();
    assert!((report.bound(Family::Friedrich).value - 4.0).abs() < 1e-12);
    assert!((report.bound(Family::WeylThm41).value - 4.0).abs() < 1e-9);
    assert_eq!(report.oracle.as_ref().unwrap().spectrum.lambda1_sq, 4.0);
    assert_eq!(Report::from_json(&report.to_json()).unwrap(), report);
}

#[test]
fn reports_are_deterministic() {
    let spec = specs().join("s2xs2.json");
    let a = run(&["analyze", spec.to_str().unwrap(), "--seed", "7"]);
    let b = run(&["analyze", spec.to_str().unwrap(), "--seed", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn flat_torus_report() {
    let spec = specs().join("torus4.json");
    let out = run(&["analyze", spec.to_str().unwrap()]);
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert!(report.bounds.iter().all(|b| b.value == 0.0));
    assert!(report.vanishing.values().all(|c| !c.holds));
    assert!(report.oracle.unwrap().spectrum.kernel_dim > 0);
}

#[test]
fn csv_and_family_filter() {
    let spec = specs().join("s2xs2.json");
    let out = run(&["analyze", spec.to_str().unwrap(), "--format", "csv", "--families", "friedrich,weyl_thm41"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 14);
    let weyl = rows.iter().find(|r| &r[0] == "weyl_thm41").unwrap();
    let v: f64 = weyl[3].parse().unwrap();
    assert!(v > 4.0 / 3.0 + 1e-6 && v <= 2.0);
    let skipped = rows.iter().find(|r| &r[0] == "full_thm52_p2").unwrap();
    assert_eq!(&skipped[6], "not requested");
    assert_eq!(run(&["analyze", spec.to_str().unwrap(), "--families", "nope"]).status.code(), Some(2));
}

#[test]
fn verify_passes_on_catalog() {
    for name in ["sphere4.json", "s2xs2.json", "s2xt2.json", "torus3_antiperiodic.json"] {
        let spec = specs().join(name);
        let out = run(&["verify", spec.to_str().unwrap()]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(out.status.success(), "{name}: {text}");
        assert!(text.contains("PASS bounds_below_spectrum"));
    }
}

#[test]
fn corrupted_grid_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut grid = String::from("2 5 5 0.5 1 1\n");
    for i in 0..25 {
        // full rows, g_12 != g_21 at one node
        let off = if i == 7 { "0.3 0.0" } else { "0.0 0.0" };
        grid.push_str(&format!("1.0 {off} 1.0\n"));
    }
    std::fs::write(dir.path().join("bad.grid"), grid).unwrap();
    std::fs::write(dir.path().join("spec.json"), r#"{"kind": "grid", "path": "bad.grid"}"#).unwrap();
    let out = run(&["verify", dir.path().join("spec.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not symmetric"));
    let missing = run(&["analyze", dir.path().join("nothing.json").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn grid_refine_reports_convergence() {
    let spec = specs().join("conformal3.json");
    let out = run(&["analyze", spec.to_str().unwrap(), "--grid-refine"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = Report::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    let r = report.refinement.unwrap();
    assert!(r.scalar_ratio.unwrap() > 3.5 && r.residual_ratio > 3.5);
}
