use std::path::PathBuf;
use std::process::{Command, Output};

fn magnus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_magnus")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut v = vec!["--format", "json"];
    v.extend_from_slice(args);
    let o = magnus(&v);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn tmp(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("magnus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn mu_json() {
    assert_eq!(json(&["mu", "--k", "2"]), serde_json::json!({"X1X2": "1/2", "X2X1": "-1/2"}));
}

#[test]
fn json_is_deterministic() {
    let a = magnus(&["--format", "json", "bch", "--n", "5"]);
    let b = magnus(&["--format", "json", "bch", "--n", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn combinatorics_commands() {
    assert_eq!(json(&["goldberg", "--monomial", "XYX"])["coefficient"], "-1/6");
    assert_eq!(json(&["theta", "--k", "4"])["coefficient"], "7/72");
    assert_eq!(json(&["theta", "--series", "3"]), serde_json::json!(["1", "1/2", "2/9"]));
    let r = json(&["resolvent", "--k", "2", "--lambda", "1/2"]);
    assert_eq!(r, serde_json::json!({"X1X2": "1/2", "X2X1": "-1/2"}));
    let o = magnus(&["--format", "csv", "mu", "--k", "3"]);
    assert!(stdout(&o).starts_with("word,coefficient\n"));
}

#[test]
fn lie_min_commands() {
    let v = json(&["lie-min", "--k", "4", "--certify"]);
    assert_eq!(v["theta_lie"], "1/72");
    assert_eq!(v["certified"], true);
    let good = tmp("k3.txt", "[[1,2],3]:1/6\n[1,[2,3]]:1/6\n");
    assert_eq!(json(&["lie-min", "--k", "3", "--check", good.to_str().unwrap()])["valid"], true);
    let bad = tmp("k3bad.txt", "[[1,2],3]:1/6\n");
    let o = magnus(&["lie-min", "--k", "3", "--check", bad.to_str().unwrap()]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn bounds_commands() {
    let v = json(&["bounds", "--constant", "delta"]);
    assert!((v["value"].as_f64().unwrap() - 2.1737374).abs() < 1e-6);
    assert!(v["est_error"].as_f64().unwrap() < 1e-6);
    let o = magnus(&["--format", "csv", "bounds", "--table", "h", "--p-grid", "0.1:3.0:5"]);
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("input,value,est_error"));
    assert_eq!(lines.count(), 5);
    assert_eq!(magnus(&["bounds", "--constant", "bogus"]).status.code(), Some(1));
}

#[test]
fn gl2_commands() {
    let v = json(&["gl2", "mp", "--matrix", "-5.6033,0,0,-3.6033"]);
    assert!(v["value"].as_f64().unwrap() > 3.0);
    let o = magnus(&["gl2", "mp", "--matrix", "1,0,0,-1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = magnus(&["gl2", "log", "--matrix", "-1,0,0,-1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&["gl2", "classify", "--matrix", "2,0.3,0,1"])["class"], "loxodromic");
    let l = json(&["gl2", "log", "--matrix", "0,-1,1,0"]);
    assert!((l["log"][1][0].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
    let nf = json(&["gl2", "normal-form", "--matrix", "1.2,0.4,0.1,0.9"]);
    assert!(nf["roundtrip_error"].as_f64().unwrap() < 1e-7);
    let e = json(&["gl2", "examples", "--name", "critical"]);
    assert!((e["exponent"].as_f64().unwrap() - 0.5).abs() < 0.02);
    assert_eq!(magnus(&["gl2", "examples", "--name", "nope"]).status.code(), Some(1));
    assert_eq!(magnus(&["gl2", "log", "--matrix", "1,2,3"]).status.code(), Some(1));
}

#[test]
fn measure_commands() {
    let m = tmp("m.txt", "0,0.1,-0.1,0;1\n0.05,0,0,-0.05;2\n");
    let v = json(&["magnus-series", "--measure", m.to_str().unwrap(), "--k-max", "8"]);
    assert!(v["reconstruction_error"].as_f64().unwrap() < 1e-6);
    let t = json(&["texp", "--measure", m.to_str().unwrap()]);
    assert!(t["lexp"].is_array());
    let r = json(&["resolvent", "--k", "20", "--lambda", "1/2", "--measure", m.to_str().unwrap()]);
    assert!(r["identity_residual"].as_f64().unwrap() < 1e-8);
    let p = tmp("p.txt", "X1;1\nX2;1\n");
    let v = json(&["magnus-series", "--measure", p.to_str().unwrap(), "--exact", "--degree", "4", "--k-max", "4"]);
    assert_eq!(v["log_minus_sum"], serde_json::json!({}));
    assert_eq!(magnus(&["texp", "--measure", "/nonexistent/file"]).status.code(), Some(1));
}

#[test]
fn reproduce_and_manifest() {
    let csv = std::env::temp_dir().join(format!("magnus-repro-{}.csv", std::process::id()));
    let man = std::env::temp_dir().join(format!("magnus-manifest-{}.json", std::process::id()));
    let o = magnus(&["reproduce", "--only", "bounds", "--emit-csv", csv.to_str().unwrap(), "--manifest", man.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("constant,reference,computed,tol,pass\n"));
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    assert!(!text.contains("theta_1"));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&man).unwrap()).unwrap();
    assert_eq!(m["subcommand"]["subcommand"], "reproduce");
    assert!(m["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(m["tolerances"]["values"]["delta"].is_number());
    assert_eq!(magnus(&["reproduce", "--only", "nope"]).status.code(), Some(1));
}

#[test]
fn tolerance_override_can_fail_rows() {
    let f = tmp("tol.conf", "delta = 1e-30\n");
    let o = magnus(&["--tolerance-file", f.to_str().unwrap(), "reproduce", "--only", "bounds"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors() {
    assert_eq!(magnus(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(magnus(&["mu"]).status.code(), Some(1));
    assert_eq!(magnus(&["--help"]).status.code(), Some(0));
    let o = magnus(&["mu", "--k", "20"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(magnus(&["--cap", "10", "--threads", "2", "mu", "--k", "4"]).status.code(), Some(0));
}
