use std::f64::consts::PI;
use std::process::{Command, Output};

fn toeplitz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toeplitz"))
        .args(args)
        .env("TOEPLITZ_THREADS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).expect("utf-8")
}

#[test]
fn multiplicity_of_regular_symbol() {
    let o = toeplitz(&["multiplicity", "--symbol", "regular", "--interval", "-0.5,0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 1);
    assert_eq!(v["n_plus"], 1);
}

#[test]
fn inadmissible_interval_is_an_analysis_error() {
    let o = toeplitz(&["multiplicity", "--symbol", "regular", "--interval", "-2,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("inadmissible interval"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(toeplitz(&["multiplicity", "--symbol", "regular", "--bogus"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["levelset", "--symbol", "nonsense", "--lambda", "0"]).status.code(), Some(1));
    assert_eq!(toeplitz(&["--help"]).status.code(), Some(0));
}

#[test]
fn exceptional_level_exits_two() {
    let o = toeplitz(&["levelset", "--symbol", "singular:0:pi", "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
}

#[test]
fn spectrum_and_levelset() {
    let o = toeplitz(&["spectrum", "--symbol", "singular:0:pi"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["essential_range"], serde_json::json!([0.0, 1.0]));
    let o = toeplitz(&["levelset", "--symbol", "regular", "--lambda", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["m"], 1);
    assert!((v["measure"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn eigenfunction_at_origin() {
    let o = toeplitz(&["eigenfun", "--symbol", "regular", "--lambda", "0", "--zgrid", "0,0;2,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!((rows[0][2] - (2.0 / PI).sqrt()).abs() < 1e-12);
    assert!((rows[1][2] - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs() < 1e-12);
    let bad = toeplitz(&["eigenfun", "--symbol", "regular", "--lambda", "0", "--branch", "2", "--zgrid", "0,0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let args = ["xi", "--symbol", "singular:0:pi/2", "--lambda", "0.3", "--zgrid", "polar:0.9:3:7"];
    let a = toeplitz(&args);
    let b = toeplitz(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 1 + 21);
}

#[test]
fn density_and_phase_tables() {
    let o = toeplitz(&["density", "--symbol", "regular", "--u", "0,0", "--v", "0,0", "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let line = stdout(&o).lines().nth(1).unwrap().to_string();
    let value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((value - 2.0 / PI).abs() < 1e-12);
    let o = toeplitz(&[
        "density", "--symbol", "regular", "--u", "0,0", "--v", "0.1,0.2", "--interval", "-0.5,0.5", "--nodes", "5",
    ]);
    assert_eq!(stdout(&o).lines().count(), 6);
    let o = toeplitz(&["phase", "--symbol", "regular", "--lambda", "0.2", "--zgrid", "0.3,0.1"]);
    let row: Vec<f64> = stdout(&o).lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[2] - row[4]).abs() < 1e-8 && (row[3] - row[5]).abs() < 1e-8);
}

#[test]
fn symbol_file_and_diagonalize() {
    let dir = tempfile::tempdir().unwrap();
    let sym = dir.path().join("sym.json");
    std::fs::write(
        &sym,
        r#"{"pieces":[{"theta_start":0.0,"theta_end":6.283185307179586,"a":[0.0,1.0],"b":[]}],"name":"cosine"}"#,
    )
    .unwrap();
    let vec = dir.path().join("vec.json");
    std::fs::write(&vec, r#"[{"c":[1.0,0.0],"z":[0.0,0.0]}]"#).unwrap();
    let o = toeplitz(&[
        "diagonalize",
        "--symbol",
        sym.to_str().unwrap(),
        "--interval",
        "-0.5,0.5",
        "--vector",
        vec.to_str().unwrap(),
        "--nodes",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let mut total = 0.0;
    for line in stdout(&o).lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        total += v[1] * (v[3] * v[3] + v[4] * v[4]);
    }
    // ‖ΦK_0‖² over (−1/2, 1/2) is (2/π)(√3/4 + π/6).
    let want = 2.0 / PI * (3f64.sqrt() / 4.0 + PI / 6.0);
    assert!((total - want).abs() < 1e-8, "{total} vs {want}");
}

#[test]
fn validate_passes_and_detects_fault() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("report");
    let o = toeplitz(&[
        "validate",
        "--symbol",
        "regular",
        "--interval",
        "-0.5,0.5",
        "--n",
        "64,128,256",
        "--output",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    let table = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert_eq!(table.lines().count(), 4);

    let o = toeplitz(&[
        "validate",
        "--symbol",
        "regular",
        "--interval",
        "-0.5,0.5",
        "--n",
        "64,128,256",
        "--perturb-coefficient",
        "1:0.05",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("\"pass\":false"));
}
