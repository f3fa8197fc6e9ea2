use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use secondkind_core::io::{read_tensor, ReportFile};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secondkind"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn make(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.path().join(name);
    let mut full: Vec<&str> = vec!["model"];
    full.extend_from_slice(args);
    let p = path.to_str().unwrap();
    full.extend_from_slice(&["--out", p]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn model_reports_scalar_curvature() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("cp2.json");
    let o = run(&["model", "cp", "--m", "2", "--c", "4", "--out", s(&path)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("n = 4, N = 9, S = 24, kahler = true (m = 2)"), "{}", stdout(&o));
    let (t, _) = read_tensor(&path).unwrap();
    assert_eq!(t.operator.scalar_curvature(), 24.0);
}

#[test]
fn flat_model_has_no_entries() {
    let dir = TempDir::new().unwrap();
    let path = make(&dir, "flat.json", &["flat", "--n", "4"]);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("\"entries\": []"), "{text}");
}

#[test]
fn random_models_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let a = make(&dir, "a.json", &["random", "--m", "2", "--seed", "7"]);
    let b = make(&dir, "b.json", &["random", "--m", "2", "--seed", "7"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn negative_curvature_arguments_parse() {
    let dir = TempDir::new().unwrap();
    let p = make(&dir, "ch2.json", &["cp", "--m", "2", "--c", "-4"]);
    let o = run(&["spectrum", "--input", s(&p)]);
    assert!(stdout(&o).contains("eigenvalues: -4 -4 -4 -4 -4 -4 2 2 2"), "{}", stdout(&o));
    let q = make(&dir, "h3.json", &["sphere", "--n", "3", "--k", "-1"]);
    assert_eq!(read_tensor(&q).unwrap().0.operator.scalar_curvature(), -6.0);
}

#[test]
fn spectrum_outputs() {
    let dir = TempDir::new().unwrap();
    let cp2 = make(&dir, "cp2.json", &["cp", "--m", "2", "--c", "4"]);
    let o = run(&["spectrum", "--input", s(&cp2)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("eigenvalues: -2 -2 -2 4 4 4 4 4 4"), "{out}");
    assert!(out.contains("threshold = 4.5"), "{out}");

    let s2r = make(&dir, "s2r.json", &["product", "--factors", "sphere:2:1,flat:1"]);
    let out = stdout(&run(&["spectrum", "--input", s(&s2r)]));
    assert!(out.contains("eigenvalues: -0.333333333333 0 0 1 1"), "{out}");

    let flat = make(&dir, "flat.json", &["flat", "--n", "3"]);
    let out = stdout(&run(&["spectrum", "--input", s(&flat), "--csv"]));
    assert_eq!(out, "index,eigenvalue\n1,0\n2,0\n3,0\n4,0\n5,0\n");

    let json = stdout(&run(&["spectrum", "--input", s(&cp2), "--json"]));
    let rep = ReportFile::from_json(&json).unwrap();
    assert_eq!(rep.n, Some(4));
    assert_eq!(rep.m, Some(2));
    assert_eq!(rep.scalar, Some(24.0));
    let digest = read_tensor(&cp2).unwrap().1;
    assert_eq!(rep.input_digest.as_deref(), Some(digest.as_str()));
}

#[test]
fn check_statuses_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let cp2 = make(&dir, "cp2.json", &["cp", "--m", "2", "--c", "4"]);
    let o = run(&["check", "--input", s(&cp2), "--alpha", "4.5"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("nonnegative (f=0"), "{}", stdout(&o));

    let o = run(&["check", "--input", s(&cp2), "--alpha", "4.4"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("indefinite (f=-"), "{}", stdout(&o));

    let flat = make(&dir, "flat.json", &["flat", "--n", "4"]);
    let o = run(&["check", "--input", s(&flat), "--alpha", "1"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("zero"), "{}", stdout(&o));

    for bad in ["0.5", "9.5", "-1"] {
        assert_eq!(code(&run(&["check", "--input", s(&cp2), "--alpha", bad])), 2, "alpha {bad}");
    }
}

#[test]
fn curvature_extremes() {
    let dir = TempDir::new().unwrap();
    let cp2 = make(&dir, "cp2.json", &["cp", "--m", "2", "--c", "4"]);
    let out = stdout(&run(&["curvatures", "--input", s(&cp2), "--samples", "200", "--csv"]));
    assert!(out.contains("hsc,4,4\n"), "{out}");
    assert!(out.contains("orth_bisec,2,2\n"), "{out}");
    assert!(out.contains("scalar,24,24\n"), "{out}");

    let flat = make(&dir, "flat.json", &["flat", "--n", "4"]);
    let out = stdout(&run(&["curvatures", "--input", s(&flat), "--samples", "50", "--csv"]));
    for line in out.lines().skip(1) {
        let vals: Vec<&str> = line.split(',').skip(1).collect();
        assert_eq!(vals, ["0", "0"], "{line}");
    }

    let pp = make(&dir, "pp.json", &["product", "--factors", "cp:1:4,cp:1:4"]);
    let json = stdout(&run(&["curvatures", "--input", s(&pp), "--samples", "2000", "--json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let min = v["functionals"]["ric_perp"]["min"].as_f64().unwrap();
    assert!(min.abs() <= 1e-6, "Ric⊥ min {min}");

    let s3 = make(&dir, "s3.json", &["sphere", "--n", "3"]);
    let o = run(&["curvatures", "--input", s(&s3)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn non_kahler_input_reports_residual() {
    let dir = TempDir::new().unwrap();
    let s4 = make(&dir, "s4.json", &["product", "--factors", "sphere:2:1,sphere:2:2"]);
    let o = run(&["curvatures", "--input", s(&s4), "--samples", "10"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("residual"));
}

#[test]
fn invalid_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"format":"secondkind-tensor","version":1,"n":4,"kahler":false,"convention":"sectional-positive","entries":[[1,2,3,4,1.0]]}"#,
    )
    .unwrap();
    let o = run(&["spectrum", "--input", s(&bad)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).to_lowercase().contains("bianchi"));

    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&run(&["spectrum", "--input", s(&bad)])), 2);
    assert_eq!(code(&run(&["spectrum", "--input", s(&dir.path().join("missing.json"))])), 2);
    assert_eq!(code(&run(&["model", "product", "--factors", "cp:2", "--out", s(&bad)])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&run(&["verify", "--suite", "identities", "--m", "1", "--trials", "1"])), 2);
}

#[test]
fn verify_suites_pass_and_write_reports() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("models.json");
    let o = run(&["verify", "--suite", "models", "--m", "2,3", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let rep = ReportFile::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(rep.passed);
    assert!(rep.suites[0].records.iter().any(|r| r.name == "CP^3(4)/threshold"));

    let o = run(&["verify", "--suite", "identities", "--m", "2", "--trials", "50", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = run(&["verify", "--suite", "props", "--m", "2", "--trials", "4", "--samples", "300"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn verify_failure_exits_1() {
    // A tolerance of zero cannot absorb rounding in the identity chains.
    let o = run(&["verify", "--suite", "identities", "--m", "3", "--trials", "3", "--tol", "1e-300"]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn verify_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let o = run(&["verify", "--suite", "identities", "--m", "2", "--trials", "5", "--seed", "9", "--out", s(p)]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
