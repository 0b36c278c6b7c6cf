use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orthomoments"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn catalog(dir: &TempDir, family: &str, count: usize) -> PathBuf {
    let p = dir.path().join(format!("{family}.json"));
    let out = run(&["catalog", family, "--count", &count.to_string(), "--out", p.to_str().unwrap()]);
    assert!(out.status.success());
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn decompose_gaussian() {
    let dir = TempDir::new().unwrap();
    let g = catalog(&dir, "gaussian", 5);
    let v = json(&run(&["decompose", s(&g), "-n", "2", "--mode", "float"]));
    let a = floats(&v["a"]);
    assert_eq!(a[..2], [0.0, 1.0]);
    assert!((a[2] - 2f64.sqrt()).abs() < 1e-12);
    let exact = json(&run(&["decompose", s(&g), "-n", "2"]));
    assert_eq!(exact["a"][2], "sqrt(2)");
    assert_eq!(exact["Pi"][2][0], "-1/2*sqrt(2)");
    let zero = json(&run(&["decompose", s(&g), "-n", "0"]));
    assert_eq!(zero["L"], serde_json::json!([["1"]]));
}

#[test]
fn decompose_diagnostics_and_errors() {
    let dir = TempDir::new().unwrap();
    let g = catalog(&dir, "gaussian", 9);
    let v = json(&run(&["decompose", s(&g), "-n", "4", "--mode", "float", "--diagnostics"]));
    assert!(v["diagnostics"]["eigenvalues"].is_array());

    let bad = write(&dir, "bad.json", r#"{"label": "x", "mode": "rational", "moments": ["2", "0", "1"]}"#);
    let out = run(&["decompose", s(&bad), "-n", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("moments not normalized"));

    let dirac = write(&dir, "dirac.json", r#"{"moments": [1, 0, 0, 0, 0]}"#);
    let out = run(&["decompose", s(&dirac), "-n", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("order 1"));

    let out = run(&["decompose", "/nonexistent/file.json", "-n", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn recurrence_subcommands() {
    let dir = TempDir::new().unwrap();
    let rec = write(&dir, "g.json", r#"{"a2": [1, 2, 3, 4], "b": [0, 0, 0, 0]}"#);
    let v = json(&run(&["recurrence", s(&rec), "--moments", "5"]));
    assert_eq!(v["moments"], serde_json::json!(["1", "0", "1", "0", "3"]));
    let v = json(&run(&["recurrence", s(&rec), "--eta", "3"]));
    assert_eq!(v["eta"][3], serde_json::json!(["0", "-3", "0", "1"]));
    let v = json(&run(&["recurrence", s(&rec), "--tau", "2"]));
    assert_eq!(v["tau"][2], serde_json::json!(["1", "0", "1"]));

    let v = json(&run(&["recurrence", "--verify-closed-forms", "10", "--seed", "7"]));
    for name in ["xi1_closed_form", "xi2_closed_form", "zeta1_closed_form", "zeta2_closed_form"] {
        let c = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap();
        assert_eq!(c["status"], "PASS", "{name}");
    }

    let broken = write(&dir, "broken.json", r#"{"a2": [1, "x"], "b": [0]}"#);
    assert_eq!(run(&["recurrence", s(&broken), "--moments", "3"]).status.code(), Some(1));
    assert_eq!(run(&["recurrence", s(&rec)]).status.code(), Some(1));
}

#[test]
fn connect_tables_and_expansions() {
    let dir = TempDir::new().unwrap();
    let u = catalog(&dir, "uniform", 41);
    let sc = catalog(&dir, "semicircle", 41);
    let v = json(&run(&["connect", s(&u), s(&u), "-n", "4"]));
    for (i, row) in v["gamma"].as_array().unwrap().iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            assert_eq!(x, if i == j { "1" } else { "0" });
        }
    }
    let v = json(&run(&["connect", s(&sc), s(&u), "-n", "0", "--rn", "10"]));
    assert_eq!(v["omega"][0], "1");
    assert_eq!(v["omega"][1], "0");
    let v = json(&run(&["connect", s(&sc), s(&u), "-n", "0", "--rn", "10", "--mode", "float"]));
    let p = floats(&v["parseval"]);
    assert!(p.windows(2).all(|w| w[0] <= w[1]));

    let v = json(&run(&["connect", "-n", "8", "--builtin-ribbon", "--ribbon", "2"]));
    assert_eq!(v["ribbon"], true);
    let v = json(&run(&["connect", "-n", "8", "--builtin-ribbon", "--ribbon", "1"]));
    assert_eq!(v["ribbon"], false);
    assert!(v["max_off_ribbon"].as_f64().unwrap() > 0.0);

    assert_eq!(run(&["connect", s(&u), s(&u), "-n", "30"]).status.code(), Some(2));
    assert_eq!(run(&["connect", "-n", "3"]).status.code(), Some(1));
}

#[test]
fn linearize_gaussian() {
    let dir = TempDir::new().unwrap();
    let g = catalog(&dir, "gaussian", 9);
    let v = json(&run(&["linearize", s(&g), "-n", "1", "-m", "1", "--mode", "float"]));
    let c = floats(&v["coeffs"]);
    assert_eq!(c[..2], [1.0, 0.0]);
    assert!((c[2] - std::f64::consts::SQRT_2).abs() < 1e-12);
    let v = json(&run(&["linearize", s(&g), "-n", "2", "-m", "2", "--basis", "monic"]));
    assert_eq!(v["coeffs"], serde_json::json!(["2", "0", "4", "0", "1"]));
    assert_eq!(run(&["linearize", s(&g), "-n", "3", "-m", "2"]).status.code(), Some(2));
}

#[test]
fn verify_pm_exit_codes() {
    let v = json(&run(&["verify-pm", "--q", "0.5", "--rho", "0.3"]));
    assert!(v["max_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["points"].as_array().unwrap().len(), 25);
    let out = run(&["verify-pm", "--q", "0.5", "--rho", "0.3", "--threshold", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(run(&["verify-pm", "--q", "1.2", "--rho", "0.3"]).status.code(), Some(1));
    let v = json(&run(&["verify-pm", "--q", "-0.5", "--rho", "0.9", "--points", "-1,0.5"]));
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_deterministic_and_csv_works() {
    let dir = TempDir::new().unwrap();
    let g = catalog(&dir, "chebyshev1", 13);
    let args = ["connect", s(&g), s(&g), "-n", "3", "--basis", "monic"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let out = run(&["decompose", s(&g), "-n", "2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "a,0,1/2*sqrt(2),1/2"));
    let target = dir.path().join("out.json");
    let out = run(&["recurrence", "--moments", "4", "--out", s(&target)]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(v["moments"][0], "1");
}
