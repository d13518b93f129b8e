use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hadperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadperm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn summary(out: &Output) -> Value {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 1, "one summary line, got {text:?}");
    serde_json::from_str(text.trim()).unwrap()
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

#[test]
fn verify_theorem1_suite_passes() {
    let out = hadperm(&["verify", "--n", "5", "--trials", "1000", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["violations"], 0);
    assert_eq!(s["instances"], 1000);
}

#[test]
fn verify_subpermanent_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let out = hadperm(&[
        "verify",
        "--n",
        "3",
        "--k",
        "2",
        "--trials",
        "1000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&path);
    // theorem4 plus two rows for each of the three default exponents.
    assert_eq!(rows.len(), 7000);
    assert!(rows.iter().all(|r| r[10] == "false"));
}

#[test]
fn corrupted_bound_exits_one() {
    let out = hadperm(&[
        "verify",
        "--n",
        "4",
        "--trials",
        "10",
        "--corrupt-bound",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(summary(&out)["violations"], 10);
}

#[test]
fn corrupt_hook_is_hidden() {
    let out = hadperm(&["verify", "--help"]);
    let help = String::from_utf8(out.stdout).unwrap();
    assert!(!help.contains("corrupt"));
    assert!(help.contains("--p-grid") && help.contains("--threads"));
}

#[test]
fn verify_given_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    std::fs::write(&m, r#"{"n":2,"k":2,"re":[1,1,1,-1],"im":[0,0,0,0]}"#).unwrap();
    let out = hadperm(&["verify", "--matrix", m.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    // perm [[1,1],[1,-1]] = 0, so the ratio is 0.
    assert_eq!(summary(&out)["max_ratio"], 0.0);
}

#[test]
fn flow_p2_is_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let out = hadperm(&[
        "flow",
        "--n",
        "4",
        "--p",
        "2",
        "--seed",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["monotone"], true);
    let eta: Vec<f64> = csv_rows(&path)
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    assert_eq!(eta.len(), 31);
    assert!(eta.windows(2).all(|w| w[1] >= w[0] - 1e-12));
}

#[test]
fn flow_brute_force_matches_reduced() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    hadperm(&[
        "flow",
        "--n",
        "3",
        "--seed",
        "2",
        "--out",
        a.to_str().unwrap(),
    ]);
    let out = hadperm(&[
        "flow",
        "--n",
        "3",
        "--seed",
        "2",
        "--brute-force",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for (ra, rb) in csv_rows(&a).iter().zip(csv_rows(&b)) {
        for (x, y) in ra.iter().zip(rb) {
            let (x, y): (f64, f64) = (x.parse().unwrap(), y.parse().unwrap());
            assert!((x - y).abs() < 1e-9);
        }
    }
}

#[test]
fn circulant_slope_is_negative_below_two() {
    let out = hadperm(&["flow", "--circulant", "0", "0", "--p", "1.5"]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert!(s["initial_slope"].as_f64().unwrap() < -1e-6);
}

#[test]
fn constant_matrix_gives_constant_trace() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("ones.json");
    std::fs::write(&m, r#"{"n":3,"k":3,"re":[1,1,1,1,1,1,1,1,1]}"#).unwrap();
    let path = dir.path().join("f.csv");
    let out = hadperm(&[
        "flow",
        "--n",
        "3",
        "--p",
        "2",
        "--matrix",
        m.to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    for row in csv_rows(&path) {
        assert!((row[1].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn invalid_flow_grid_exits_two() {
    assert_eq!(hadperm(&["flow", "--t-max", "-1"]).status.code(), Some(2));
    assert_eq!(hadperm(&["flow", "--t-points", "1"]).status.code(), Some(2));
    assert_eq!(
        hadperm(&["flow", "--n", "7", "--brute-force"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn cp_sweep_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.csv");
    let out = hadperm(&[
        "cp",
        "--n",
        "3",
        "--p-grid",
        "1:2:11",
        "--seed",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&path);
    assert_eq!(rows.len(), 11);
    let best = |r: &Vec<String>| r[2].parse::<f64>().unwrap();
    assert!((best(&rows[0]) - 1.0).abs() < 1e-6);
    assert!((best(&rows[10]) - 6.0 / 27f64.sqrt()).abs() < 1e-6);
    for r in &rows {
        let upper: f64 = r[4].parse().unwrap();
        assert!(best(r) <= upper + 1e-9);
    }
}

#[test]
fn cp_n2_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.json");
    let out = hadperm(&[
        "cp",
        "--n",
        "2",
        "--p",
        "1.5",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["schema"], "hadperm/cp/v1");
    assert!((doc["rows"][0][2].as_f64().unwrap() - 1.0).abs() < 1e-6);
}

#[test]
fn cp_rejects_grid_outside_unit_interval() {
    assert_eq!(hadperm(&["cp", "--p-grid", "1:3:3"]).status.code(), Some(2));
    assert_eq!(hadperm(&["cp", "--p-grid", "1:2"]).status.code(), Some(2));
}

#[test]
fn interp_permanent_tensor_has_no_violation() {
    let out = hadperm(&["interp", "--perm-tensor", "--n", "3", "--t-points", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(summary(&out)["violations"], 0);
}

#[test]
fn interp_random_form_and_explicit_segment() {
    let out = hadperm(&[
        "interp", "--m", "2", "--n", "3", "--seed", "5", "--q", "0.9,0.2", "--r", "0.1,0.7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = summary(&out);
    assert_eq!(s["q"], serde_json::json!([0.9, 0.2]));
    assert_eq!(hadperm(&["interp", "--q", "2,0"]).status.code(), Some(2));
}

#[test]
fn missing_matrix_file_exits_two() {
    assert_eq!(
        hadperm(&["verify", "--matrix", "/nonexistent/m.json"])
            .status
            .code(),
        Some(2)
    );
}
