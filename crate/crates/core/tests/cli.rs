//! Runs the `eyeclone` binary and checks outputs and exit codes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eyeclone")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_csv_header_and_undefined_visibility() {
    let out = run(&["sweep", "--g-list", "0,1", "--extra-loss", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0].join(","), "g,N_mean,epsilon,V,p_yn,p_ny,p_yy,p_nn,eta_total");
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][0], "0");
    assert_eq!(rows[1][2], "0");
    assert_eq!(rows[1][3], "");
    assert!(!rows[2][3].is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("# peak"));
}

#[test]
fn sweep_json_marks_undefined_visibility_null() {
    let out = run(&["sweep", "--g-list", "0", "--extra-loss", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["rows"][0]["visibility"].is_null());
    assert_eq!(v["summary"][0]["epsilon_max"], 0.0);
}

#[test]
fn witness_margin_is_twice_the_transmission() {
    let out = run(&["witness", "--g", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let col = rows[0].iter().position(|h| h == "margin").unwrap();
    assert_eq!(rows[1][col], "0.16");

    let out = run(&["witness", "--g", "0", "--eta", "1"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[1][col], "2");
}

#[test]
fn witness_verify_agrees_with_oracle() {
    let out = run(&["witness", "--g", "1", "--eta", "0.5", "--verify", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["oracle_max_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn bell_is_reproducible() {
    let args = ["bell", "--n-mean", "288", "--trials", "200000", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let rows = csv_rows(&stdout(&a));
    let col = |name: &str| rows[0].iter().position(|h| h == name).unwrap();
    let s: f64 = rows[1][col("S_analytic")].parse().unwrap();
    assert!(s > 2.0);
    let other = run(&["bell", "--n-mean", "288", "--trials", "200000", "--seed", "12"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn verify_quick_passes_and_injected_failure_is_named() {
    let out = run(&["verify", "--level", "quick"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    let name = first.split_whitespace().nth(1).unwrap();

    let out = run(&["verify", "--inject-failure", name]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(name));
    assert!(stdout(&out).contains(&format!("FAIL {name}")));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["sweep", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--theta", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["witness"]).status.code(), Some(2));
    assert_eq!(run(&["witness", "--g", "1", "--n-mean", "5"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn numerical_failure_exits_3() {
    let out = run(&["sweep", "--g-list", "40", "--extra-loss", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# witness settings\neta = 0.5\ng = 1\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let out = run(&["witness", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let col = rows[0].iter().position(|h| h == "margin").unwrap();
    assert_eq!(rows[1][col], "1");

    let out = run(&["witness", "--config", cfg, "--eta", "0.08"]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[1][col], "0.16");

    std::fs::write(dir.path().join("bad.conf"), "colour = blue\n").unwrap();
    let bad = dir.path().join("bad.conf");
    assert_eq!(run(&["witness", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn output_file_receives_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.csv");
    let out = run(&["witness", "--g", "0.5", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().starts_with("g,eta,"));
}
