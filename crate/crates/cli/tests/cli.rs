use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use abw_core::process::json::ProcessFile;
use abw_core::process::{classes_equal, GaussianProcess};
use abw_core::simulate::empirical_covariance;
use nalgebra::{dmatrix, DMatrix};
use serde_json::Value;
use tempfile::TempDir;

fn abw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn read_process(p: &Path) -> GaussianProcess {
    let file: ProcessFile = serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap();
    file.into_process().unwrap()
}

fn ar1_file(dir: &Path, name: &str, alphas: &str, sigmas: &str) -> PathBuf {
    let spec = write(
        dir,
        &format!("{name}.spec.json"),
        &format!(r#"{{"alphas": {alphas}, "sigmas": {sigmas}}}"#),
    );
    let out = dir.join(format!("{name}.json"));
    let o = abw(&["ar1", path_str(&spec), "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn example_pair(dir: &Path) -> (PathBuf, PathBuf) {
    (
        ar1_file(dir, "l1", "[0, 0.5]", "[1, 1]"),
        ar1_file(dir, "l2", "[0, -0.5]", "[1, 1]"),
    )
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn csv_matrix(p: &Path) -> DMatrix<f64> {
    let mut reader = csv::Reader::from_path(p).unwrap();
    let rows: Vec<Vec<f64>> = reader
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    DMatrix::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
}

#[test]
fn ar1_examples() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("[0, 0.5]", "[1, 1]", dmatrix![1.0, 0.0; 0.5, 1.0]),
        ("[0, 0]", "[2, 3]", dmatrix![2.0, 0.0; 0.0, 3.0]),
        ("[0, -0.5]", "[1, 1]", dmatrix![1.0, 0.0; -0.5, 1.0]),
    ];
    for (i, (a, s, expected)) in cases.into_iter().enumerate() {
        let p = read_process(&ar1_file(dir.path(), &format!("c{i}"), a, s));
        assert_eq!(p.factor().matrix(), &expected);
        assert!(p.mean().iter().all(|&m| m == 0.0));
    }
    let bad = write(dir.path(), "bad.json", r#"{"alphas": [0, 0.5], "sigmas": [1, 0]}"#);
    let o = abw(&["ar1", path_str(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigmas[1]"));
}

#[test]
fn distance_examples() {
    let dir = TempDir::new().unwrap();
    let (l1, l2) = example_pair(dir.path());
    let o = abw(&["distance", path_str(&l1), path_str(&l2), "--check-decomposition"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert!((v["abw"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["aw2"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!((v["abw_via_columns"].as_f64().unwrap() - 1.0).abs() < 1e-7);
    assert_eq!(v["mean_gap"].as_f64().unwrap(), 0.0);

    let o = abw(&["distance", path_str(&l1), path_str(&l1)]);
    let v = stdout_json(&o);
    for key in ["aw2", "abw", "abw_via_columns", "mean_gap"] {
        assert!(v[key].as_f64().unwrap() < 1e-7, "{key}");
    }

    let l3 = ar1_file(dir.path(), "l3", "[0, 0.5, 0.5]", "[1, 1, 1]");
    let o = abw(&["distance", path_str(&l1), path_str(&l3)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("`T`"));
}

#[test]
fn malformed_input_names_the_field() {
    let dir = TempDir::new().unwrap();
    let upper = write(
        dir.path(),
        "upper.json",
        r#"{"d": 1, "T": 2, "mean": [0, 0], "L": [[1, 0.3], [0, 1]]}"#,
    );
    let o = abw(&["distance", path_str(&upper), path_str(&upper)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("L[0][1]"));

    let short = write(dir.path(), "short.json", r#"{"d": 1, "T": 2, "mean": [0], "L": [[1, 0], [0, 1]]}"#);
    let o = abw(&["barycenter", path_str(&short)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mean"));

    let o = abw(&["distance", "/nonexistent/a.json", path_str(&short)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn barycenter_of_example_pair() {
    let dir = TempDir::new().unwrap();
    let (l1, l2) = example_pair(dir.path());
    let out = dir.path().join("bary");
    let o = abw(&["barycenter", path_str(&l1), path_str(&l2), "--classical-compare", "--out", path_str(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p = read_process(&out.join("barycenter.json"));
    assert!((p.factor().matrix() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-8);

    let c = csv_matrix(&out.join("classical_covariance.csv"));
    assert!((c[(0, 0)] - 0.934).abs() < 2e-3 && (c[(1, 1)] - 1.199).abs() < 2e-3);
    let cmp = csv_matrix(&out.join("comparison.csv"));
    assert_eq!(cmp.column(0).as_slice(), &[1.0, 2.0]);
    assert!((cmp[(0, 1)] - 1.0).abs() < 1e-12);

    let diag: Value = serde_json::from_str(&fs::read_to_string(out.join("diagnostics.json")).unwrap()).unwrap();
    assert_eq!(diag["converged"], Value::Bool(true));
    assert!(diag["objective_trace"].as_array().unwrap().len() >= 2);

    for method in ["columns", "oracle-1d"] {
        let out = dir.path().join(method);
        let o = abw(&["barycenter", path_str(&l1), path_str(&l2), "--method", method, "--out", path_str(&out)]);
        assert!(o.status.success());
        let p = read_process(&out.join("barycenter.json"));
        assert!((p.factor().matrix() - DMatrix::<f64>::identity(2, 2)).norm() < 1e-8);
    }
}

#[test]
fn barycenter_flags() {
    let dir = TempDir::new().unwrap();
    let (l1, l2) = example_pair(dir.path());
    let shifted = write(
        dir.path(),
        "shifted.json",
        r#"{"d": 1, "T": 2, "mean": [2, -1], "L": [[1, 0], [0.3, 0.8]]}"#,
    );

    // single input: the same class comes back
    let out = dir.path().join("single");
    assert!(abw(&["barycenter", path_str(&shifted), "--out", path_str(&out)]).status.success());
    let back = read_process(&out.join("barycenter.json"));
    let original = read_process(&shifted);
    assert!(classes_equal(back.factor(), original.factor(), 1e-10).unwrap());
    assert_eq!(back.mean(), original.mean());

    // unnormalized weights are rescaled with a warning
    let out = dir.path().join("weighted");
    let o = abw(&["barycenter", path_str(&l1), path_str(&shifted), "--weights", "1,3", "--out", path_str(&out)]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let p = read_process(&out.join("barycenter.json"));
    assert!((p.mean()[0] - 1.5).abs() < 1e-15);

    let o = abw(&["barycenter", path_str(&l1), path_str(&l2), "--weights", "1"]);
    assert_eq!(o.status.code(), Some(1));

    // capped iterations report non-convergence after writing diagnostics
    // the weighted mean start needs a sign flip in the first column
    let flipped = write(dir.path(), "flipped.json", r#"{"d": 1, "T": 2, "mean": [0, 0], "L": [[-1, 0], [0.3, 0.8]]}"#);
    let out = dir.path().join("capped");
    let o = abw(&[
        "barycenter", path_str(&l1), path_str(&flipped), "--weights", "0.25,0.75", "--max-iter", "1", "--out",
        path_str(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(out.join("diagnostics.json").exists());
}

#[test]
fn ar1_round_trip_through_barycenter() {
    let dir = TempDir::new().unwrap();
    let p = ar1_file(dir.path(), "x", "[0, 0.7, -0.4, 0.9]", "[1, 0.5, 2, 1.2]");
    let out = dir.path().join("self");
    assert!(abw(&["barycenter", path_str(&p), path_str(&p), "--out", path_str(&out)]).status.success());
    let a = read_process(&p);
    let b = read_process(&out.join("barycenter.json"));
    assert!(classes_equal(a.factor(), b.factor(), 1e-10).unwrap());
}

#[test]
fn simulate_examples() {
    let dir = TempDir::new().unwrap();
    let zero = write(dir.path(), "zero.json", r#"{"d": 1, "T": 2, "mean": [5, 5], "L": [[0, 0], [0, 0]]}"#);
    let o = abw(&["simulate", path_str(&zero), "--paths", "3"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text, "path_id,t1,t2\n1,5,5\n2,5,5\n3,5,5\n");

    let (l1, _) = example_pair(dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = abw(&["simulate", path_str(&l1), "--paths", "100000", "--seed", "9", "--out", path_str(out)]);
        assert!(o.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let paths = csv_matrix(&a).columns(1, 2).into_owned();
    let emp = empirical_covariance(&paths);
    let target = dmatrix![1.0, 0.5; 0.5, 1.25];
    for (e, t) in emp.iter().zip(target.iter()) {
        assert!((e - t).abs() <= 0.05 * t, "{e} vs {t}");
    }

    let o = abw(&["simulate", path_str(&l1), "--paths", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn experiments_are_reproducible() {
    let dir = TempDir::new().unwrap();
    for name in ["sec5", "sec6"] {
        let first = dir.path().join(format!("{name}-1"));
        let second = dir.path().join(format!("{name}-2"));
        for out in [&first, &second] {
            let o = abw(&["experiment", name, "--out", path_str(out), "--seed", "3"]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        let mut files: Vec<_> = fs::read_dir(&first).unwrap().map(|e| e.unwrap().file_name()).collect();
        files.sort();
        assert!(!files.is_empty());
        for f in files {
            assert_eq!(fs::read(first.join(&f)).unwrap(), fs::read(second.join(&f)).unwrap(), "{f:?}");
        }
    }
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sec5-1/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], Value::Bool(true));
    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("sec6-1/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["var_abw"].as_array().unwrap().len(), 30);
    assert!(summary["offdiagonal"]["abw_ratio"].is_number());
}

#[test]
fn thread_count_from_environment() {
    let dir = TempDir::new().unwrap();
    let (l1, l2) = example_pair(dir.path());
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_abw"))
            .args(["distance", path_str(&l1), path_str(&l2)])
            .env("ABW_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert!(one.status.success());
    assert_eq!(one.stdout, run("0").stdout);
    assert_eq!(run("many").status.code(), Some(1));
}
