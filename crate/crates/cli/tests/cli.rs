use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn section(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../sections").join(format!("{name}.json"))
}

fn svsection(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_svsection"))
        .args(args)
        .env_remove("SVSECTION_ELEMENT_BUDGET")
        .output()
        .unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn compute_writes_report_and_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let vtk = dir.path().join("f.vtk");
    let run = svsection(&["compute", "--section", s(&section("square")), "--nu", "0,0.3", "--out", s(&out), "--fields", s(&vtk)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let chi_t = report["torsion"]["chi_t"].as_f64().unwrap();
    assert!((chi_t - 1.1856).abs() < 0.01 * 1.1856);
    assert_eq!(report["shear"].as_array().unwrap().len(), 4);
    assert_eq!(report["provenance"]["levels"].as_array().unwrap().len(), 3);
    assert!(std::fs::read_to_string(&vtk).unwrap().contains("CELL_DATA"));
}

#[test]
fn converge_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let run = svsection(&["converge", "--section", s(&section("circle")), "--refinements", "3", "--out", s(&out)]);
    assert!(run.status.success());
    let csv = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("level,h,triangles,"));
    let order: f64 = lines[3].rsplit(',').next().unwrap().parse().unwrap();
    assert!((1.7..=2.3).contains(&order), "{order}");
}

#[test]
fn fuzz_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let sections = format!("{},{}", s(&section("square")), s(&section("l_shape")));
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let run = svsection(&["fuzz", "--section", &sections, "--samples", "25", "--seed", "9", "--out", s(p)]);
        assert!(run.status.success());
    }
    let a = std::fs::read(&paths[0]).unwrap();
    assert_eq!(a, std::fs::read(&paths[1]).unwrap());
    // 11 rows per seed and simply connected section
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 1 + 25 * 2 * 11);
}

#[test]
fn fuzz_with_no_samples_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.csv");
    let run = svsection(&["fuzz", "--section", s(&section("circle")), "--samples", "0", "--out", s(&out)]);
    assert!(run.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), "seed,kind,section,inequality_id,lhs,rhs,margin\n");
}

#[test]
fn failures_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");

    let missing = svsection(&["compute", "--section", "/nonexistent/section.json", "--out", s(&out)]);
    assert_eq!(missing.status.code(), Some(1));

    let hollow = svsection(&["compute", "--section", s(&section("annulus")), "--nu", "0", "--out", s(&out)]);
    assert_eq!(hollow.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&hollow.stderr).contains("error"));

    let budget = svsection(&["compute", "--section", s(&section("circle")), "--element-budget", "500", "--out", s(&out)]);
    assert_eq!(budget.status.code(), Some(1));
    assert!(!out.exists());

    let usage = svsection(&["compute", "--out", s(&out)]);
    assert_eq!(usage.status.code(), Some(2));
}
