use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn evoalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_evoalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_e2_text() {
    let dir = TempDir::new().unwrap();
    let e2 = write(&dir, "e2.json", r#"{"n": 2, "matrix": [[1, 0], [1, 0]]}"#);
    let out = evoalg(&["analyze", "--input", s(&e2)]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("regular=false"), "{text}");
    assert!(text.contains("idempotents=[(1+0i, 0+0i)]"), "{text}");
    assert!(text.contains("backend=exact"), "{text}");
}

#[test]
fn solve_one_real_and_check() {
    let dir = TempDir::new().unwrap();
    let one_real = write(
        &dir,
        "one_real.json",
        r#"{"n": 3, "matrix": [[1, -2, -3], [0, 0, 1], [0, 1, 1]]}"#,
    );
    let out = evoalg(&["solve", "--system", "general", "--input", s(&one_real), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "evoalg-solve-v1");
    let sols = v["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 8);
    let real_nontrivial: Vec<_> = sols
        .iter()
        .filter(|s| s["real"] == true && !s["support"].as_array().unwrap().is_empty())
        .collect();
    assert_eq!(real_nontrivial.len(), 1);
    let p = real_nontrivial[0]["point"].as_array().unwrap();
    let expect = [1.0, 0.0, 0.0];
    for (c, e) in p.iter().zip(expect) {
        assert!((c[0].as_f64().unwrap() - e).abs() < 1e-8);
        assert!(c[1].as_f64().unwrap().abs() < 1e-8);
    }

    let saved = write(&dir, "sol.json", &stdout(&out));
    let chk = evoalg(&["check", "--input", s(&saved), "--json"]);
    assert_eq!(chk.status.code(), Some(0));
    let c: Value = serde_json::from_str(&stdout(&chk)).unwrap();
    assert_eq!(c["reproduced"], true);
    assert_eq!(c["within_tol_final"], 8);
}

#[test]
fn check_flags_tampered_residuals() {
    let dir = TempDir::new().unwrap();
    let id = write(&dir, "id.json", r#"{"n": 2, "matrix": [[1, 0], [0, 1]]}"#);
    let out = evoalg(&["solve", "--system", "general", "--input", s(&id), "--json"]);
    let mut v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    v["solutions"][0]["point"][0][0] = Value::from(0.25);
    let bad = write(&dir, "bad.json", &v.to_string());
    let chk = evoalg(&["check", "--input", s(&bad)]);
    assert_eq!(chk.status.code(), Some(3));
    assert!(stdout(&chk).contains("reproduced=false"));
}

#[test]
fn parse_errors_name_the_path() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"n": 2, "matrix": [[1, 0], ["1/0", 0]]}"#);
    let out = evoalg(&["analyze", "--input", s(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.matrix[1][0]"));

    let short = write(&dir, "short.json", r#"{"n": 2, "matrix": [[1, 0]]}"#);
    let out = evoalg(&["idempotents", "--input", s(&short)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("$.matrix"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(evoalg(&["solve"]).status.code(), Some(2));
    assert_eq!(
        evoalg(&["verify", "theorem99", "--n", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        evoalg(&["verify", "theorem21", "--n", "1", "--trials", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        evoalg(&["analyze", "--input", "/nonexistent/x.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        evoalg(&["conjecture", "--sweep", "1", "--tol-final", "-1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn subalgebras_require_regularity() {
    let dir = TempDir::new().unwrap();
    let e2 = write(&dir, "e2.json", r#"{"n": 2, "matrix": [[1, 0], [1, 0]]}"#);
    assert_eq!(evoalg(&["subalgebras", "--input", s(&e2)]).status.code(), Some(2));

    let id = write(&dir, "id.json", r#"{"n": 2, "matrix": [[1, 0], [0, 1]]}"#);
    let out = evoalg(&["subalgebras", "--input", s(&id), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["one_dim_subalgebras"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_theorem_campaign() {
    let out = evoalg(&[
        "verify",
        "theorem21",
        "--n",
        "4",
        "--trials",
        "50",
        "--seed",
        "9",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], "evoalg-report-v1");
    assert_eq!(v["trials"], 50);
    assert_eq!(v["counterexample_candidates"].as_array().unwrap().len(), 0);
    let passes = v["passes"].as_u64().unwrap();
    let shortfalls = v["solver_shortfalls"].as_u64().unwrap();
    assert_eq!(passes + shortfalls, 50);
}

#[test]
fn parallel_and_serial_reports_identical() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let base = [
        "conjecture",
        "--sweep",
        "30",
        "--n-max",
        "4",
        "--seed",
        "5",
        "--json",
    ];
    let serial = evoalg(&[&base[..], &["--output", s(&a)]].concat());
    let parallel = evoalg(&[&base[..], &["--output", s(&b), "--parallel"]].concat());
    assert_eq!(serial.status.code(), Some(0));
    assert_eq!(parallel.status.code(), Some(0));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let solve = |extra: &[&str]| {
        let dir = TempDir::new().unwrap();
        let m = write(
            &dir,
            "m.json",
            r#"{"n": 3, "matrix": [["1/2", 3, -1], [2, "-5/7", 1], [0, 1, 4]]}"#,
        );
        stdout(&evoalg(
            &[
                &["solve", "--system", "idempotent", "--input", s(&m), "--json"][..],
                extra,
            ]
            .concat(),
        ))
    };
    assert_eq!(solve(&[]), solve(&["--parallel"]));
}

#[test]
fn conjecture_single_algebra() {
    let dir = TempDir::new().unwrap();
    let chain = write(
        &dir,
        "chain.json",
        r#"{"n": 3, "matrix": [[0, 1, 0], [0, 0, 1], [0, 0, 0]]}"#,
    );
    let out = evoalg(&["conjecture", "--input", s(&chain), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["solvable"], true);
    assert_eq!(v["solvability_exact"], true);
    assert_eq!(v["has_idempotent"], false);
    assert_eq!(v["only_trivial_solution"], true);
    assert_eq!(v["consistent"], true);
}

#[test]
fn text_is_default_and_json_flag_conflicts() {
    let out = evoalg(&["verify", "idempotents", "--n", "2", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("campaign=idempotent-existence n=2"));
    assert_eq!(
        evoalg(&[
            "verify",
            "idempotents",
            "--n",
            "2",
            "--trials",
            "5",
            "--json",
            "--text"
        ])
        .status
        .code(),
        Some(2)
    );
}
