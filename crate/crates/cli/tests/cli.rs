use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ncalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let o = ncalc(&all);
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn spec(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("specs").join(name).display().to_string()
}

#[test]
fn diff_prints_forms() {
    let o = ncalc(&["diff", "-a", "quaternions", "-e", "x*x", "-n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "h·x + x·h");
    assert_eq!(stdout(&ncalc(&["diff", "-a", "quaternions", "-e", "(1,2,3,4)", "-n", "1"])), "0");
    assert_eq!(stdout(&ncalc(&["diff", "-e", "x*x", "-n", "2"])), "h1·h2 + h2·h1");
}

#[test]
fn diff_at_point_cross_checks_numerically() {
    let v = json(&["diff", "-a", "quaternions", "-e", "inv(x)", "-n", "1", "--at", "0,1,0,0", "--dir", "1,0,0,0"]);
    // -i^-1 · 1 · i^-1 = -(-i)(-i) = 1
    assert_eq!(v["value"], serde_json::json!(["1", "0", "0", "0"]));
    assert_eq!(v["finite_difference"]["pass"], true);
    assert!(v["finite_difference"]["abs_error"].as_f64().unwrap() < 1e-9);
}

#[test]
fn tolerance_comes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ncalc"))
        .args(["diff", "-e", "x*x", "--at", "1,2,0,0", "--dir", "0,1,0,0", "--json"])
        .env("NCALC_TOL", "0.001")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["finite_difference"]["tolerance"], 0.001);
}

#[test]
fn decimals_select_float_path() {
    let v = json(&["diff", "-e", "x*i*x", "--at", "0.5,0,0,0", "--dir", "1,0,0,0"]);
    let value: Vec<f64> = v["value"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    assert_eq!(value, vec![0.0, 1.0, 0.0, 0.0]);
}

#[test]
fn exponent() {
    let v = json(&["exp", "-a", "complex", "-x", "0,3.14159265", "-N", "30"]);
    let value: Vec<f64> = v["value"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    assert!((value[0] + 1.0).abs() < 1e-12 && value[1].abs() < 1e-8);
    assert_eq!(v["order"], 30);
    let v = json(&["exp", "-a", "quaternions", "-x", "0,1,0,0", "--with", "0,0,1,0"]);
    assert_eq!(v["sum_check"]["equal"], false);
    assert!((v["sum_check"]["commutator_norm"].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn solve_tensor() {
    let o = ncalc(&["solve-tensor", "-a", "complex", "--map", "conj"]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "1·conj"));
    let o = ncalc(&["solve-tensor", "-a", "quaternions", "--map", "conj"]);
    assert_eq!(stdout(&o), "-1/2·(1⊗1) - 1/2·(i⊗i) - 1/2·(j⊗j) - 1/2·(k⊗k)");
    // x0 + x1 e -> x1 is outside the span of x -> a x b and conjugation
    let o = ncalc(&["solve-tensor", "-a", "dual", "--matrix", "0,1;0,0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ncalc(&["solve-tensor", "-a", "complex", "--matrix", "1,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn algebra_info() {
    let v = json(&["algebra", "-a", "quaternions"]);
    assert_eq!(v["representation"]["rank"], 16);
    assert_eq!(v["representation_basis"], "{δ}");
    let v = json(&["algebra", "-a", "complex"]);
    assert_eq!(v["representation"]["rank"], 2);
    assert_eq!(v["representation_basis"], "{δ, conj}");
    assert_eq!(json(&["algebra", "-a", "reals"])["representation"]["rank"], 1);
    let v = json(&["algebra", "-a", "octonions", "--check", "--seed", "5"]);
    assert_eq!(v["flags"]["associative"], false);
    assert_eq!(v["passed"], true);
}

#[test]
fn integrate_specs() {
    let o = ncalc(&["integrate", "--spec", &spec("cube.toml")]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "y = x^3"));
    let o = ncalc(&["integrate", "--spec", &spec("not_integrable.toml")]);
    assert_eq!(o.status.code(), Some(2));
    let v = json(&["integrate", "--spec", &spec("not_integrable.toml")]);
    assert_eq!(v["verdict"], "not_integrable");
    assert_eq!(v["witness"]["order"], 2);
    assert_eq!(v["witness"]["transposition"], serde_json::json!([1, 2]));
}

#[test]
fn emitted_specs_round_trip() {
    let dir = std::env::temp_dir().join(format!("ncalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for name in ["cube.toml", "sandwich.toml", "not_integrable.toml"] {
        let first = json(&["integrate", "--spec", &spec(name)]);
        let path = dir.join(name.replace(".toml", ".json"));
        std::fs::write(&path, serde_json::to_string(&first["spec"]).unwrap()).unwrap();
        let second = json(&["integrate", "--spec", path.to_str().unwrap()]);
        assert_eq!(first, second, "{name}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn human_and_json_agree() {
    let human = stdout(&ncalc(&["integrate", "--spec", &spec("sandwich.toml")]));
    let v = json(&["integrate", "--spec", &spec("sandwich.toml")]);
    assert_eq!(human, format!("y = {}", v["solution"].as_str().unwrap()));
    let human = stdout(&ncalc(&["diff", "-e", "i*x*j*x", "-n", "1"]));
    assert_eq!(human, json(&["diff", "-e", "i*x*j*x", "-n", "1"])["derivative"]);
}

#[test]
fn taylor_command() {
    let v = json(&["taylor", "-a", "quaternions", "-e", "x*x*x", "--at", "0,0,0,0"]);
    assert_eq!(v["simplified"], "x^3");
    assert_eq!(v["equal"], true);
    let v = json(&["taylor", "-a", "quaternions", "-e", "i*x*j*x", "--at", "0,0,0,1"]);
    assert_eq!(v["equal"], true);
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(ncalc(&["diff", "-a", "quaternions"]).status.code(), Some(1));
    assert_eq!(ncalc(&["frobnicate"]).status.code(), Some(1));
    let o = ncalc(&["diff", "-e", "x * q"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 4"), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(ncalc(&["algebra", "-a", "sedenions"]).status.code(), Some(1));
    assert_eq!(ncalc(&["--help"]).status.code(), Some(0));
}

#[test]
fn selftest_passes() {
    let o = ncalc(&["selftest", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().all(|l| l.starts_with("[PASS]")));
}
