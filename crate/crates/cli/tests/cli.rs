use std::fs;

use roughwall_cli::run;

fn call(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let code = run(std::iter::once("roughwall").chain(args.iter().copied()), &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn last_line(s: &str) -> &str {
    s.lines().last().unwrap_or("")
}

/// Value after `key = ` in a summary line.
fn summary_value(line: &str, key: &str) -> f64 {
    let rest = &line[line.find(key).unwrap() + key.len()..];
    rest.split([' ', ';', ',', ')']).next().unwrap().parse().unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out) = call(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("det-sweep"));
    assert_eq!(call(&["--version"]).0, 0);
}

#[test]
fn malformed_command_lines_exit_64() {
    assert_eq!(call(&["bogus"]).0, 64);
    assert_eq!(call(&["rank", "--a", "abc"]).0, 64);
    assert_eq!(call(&["det-sweep", "--grid", "w=1,2"]).0, 64);
    assert_eq!(call(&["det-sweep", "--grid", "z"]).0, 64);
    assert_eq!(call(&["kernel", "--r", "1,2"]).0, 64);
}

#[test]
fn invalid_inputs_exit_2() {
    assert_eq!(call(&["fields", "--state", "1,1"]).0, 2);
    assert_eq!(call(&["fields", "--a", "-1"]).0, 2);
    // the lowest sphere would touch the wall
    assert_eq!(call(&["fields", "--state", "1.2,0.9,1.45,0,0,0,0.2"]).0, 2);
    assert_eq!(call(&["brackets", "--swimmer", "4sphere"]).0, 2);
    // stroke start differs from the given arm lengths
    assert_eq!(call(&["simulate", "--state", "1.1,1,1.2,0,0,0,3"]).0, 2);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    fs::write(&p, r#"{"radius": 0.1}"#).unwrap();
    assert_eq!(call(&["fields", "--config", p.to_str().unwrap()]).0, 2);
    assert_eq!(call(&["fields", "--config", dir.path().join("missing.json").to_str().unwrap()]).0, 2);
}

#[test]
fn numerical_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.json");
    fs::write(&p, r#"{"integrator": {"tol": 1e-30, "initial_steps": 2, "max_steps": 4}}"#).unwrap();
    let (code, _) = call(&["simulate", "--config", p.to_str().unwrap(), "--state", "1,1,1.2,0,0,0,3"]);
    assert_eq!(code, 3);
}

#[test]
fn unwritable_output_exits_74() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("no/such/dir/out.csv");
    assert_eq!(call(&["kernel", "--out", bad.to_str().unwrap()]).0, 74);
}

#[test]
fn four_sphere_rank_is_full_on_a_flat_wall() {
    let (code, out) = call(&["rank", "--swimmer", "4sphere", "--eps", "0"]);
    assert_eq!(code, 0);
    assert_eq!(last_line(&out), "rank = 10");
}

#[test]
fn flat_wall_stroke_stays_planar() {
    let (code, out) = call(&["simulate", "--check-planar", "--state", "1,1,1.2,0,0,0,3"]);
    assert_eq!(code, 0);
    let line = last_line(&out);
    assert!(summary_value(line, "max |dy| = ") < 1e-12, "{line}");
    assert!(summary_value(line, "max |dphi| = ") < 1e-12, "{line}");
    // one header plus 4 legs of at least 8 steps plus the initial state
    assert!(out.lines().count() >= 2 + 33);
}

#[test]
fn single_point_sweep_matches_brackets() {
    let common = ["--a", "0.05", "--eps", "0.01", "--state", "1.2,0.9,1.45,0.3,0,0,0.8"];
    let (code, b) = call(&[&["brackets"], &common[..]].concat());
    assert_eq!(code, 0);
    let det_b = summary_value(last_line(&b), "det7 = ");
    let (code, s) = call(&[&["det-sweep", "--no-rank"], &common[..]].concat());
    assert_eq!(code, 0);
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    let det_s: f64 = row[10].parse().unwrap();
    assert_eq!(det_b, det_s);
    assert_eq!(row[13], "ok");
}

#[test]
fn flat_wall_sweep_reports_noise() {
    let (code, out) = call(&["det-sweep", "--eps", "0", "--no-rank", "--grid", "z=0.8,1.5"]);
    assert_eq!(code, 0);
    let body: Vec<&str> = out.lines().skip(1).take(2).collect();
    assert!(body.iter().all(|l| l.ends_with(",noise")), "{out}");
    assert!(last_line(&out).contains("0 ok, 2 noise"));
}

#[test]
fn sweeps_are_byte_reproducible_and_ordered() {
    let args = ["det-sweep", "--eps", "0", "--grid", "z=1.5,0.8,0.2", "--grid", "x=0,1"];
    let (c1, o1) = call(&args);
    let (c2, o2) = call(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(o1, o2);
    let idx: Vec<usize> = o1.lines().skip(1).take(6).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(idx, (0..6).collect::<Vec<_>>());
    assert!(o1.contains("invalid: "));
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let json = dir.path().join("m.json");
    fs::write(&cfg, r#"{"a": 0.05, "mu": 2.0, "state": [1.2, 0.9, 1.45, 0.3, 0.0, 0.0, 3.0]}"#).unwrap();
    let (code, _) = call(&["mobility", "--config", cfg.to_str().unwrap(), "--a", "0.02", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let m11 = doc["m"][0][0].as_f64().unwrap();
    let want = -24.0 * std::f64::consts::PI * 2.0 * 0.02f64.powi(3);
    assert!((m11 - want).abs() < 1e-12 * want.abs(), "{m11} vs {want}");
}

#[test]
fn out_flag_moves_the_table_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("k.csv");
    let (code, out) = call(&["kernel", "--kind", "stokeslet", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    let table = fs::read_to_string(&p).unwrap();
    assert_eq!(table.lines().count(), 10);
    assert!(table.starts_with("row,col,value"));
}

#[test]
fn verify_appendix_reproduces_the_tabulated_constants() {
    let (code, out) = call(&["verify-appendix"]);
    assert_eq!(code, 0);
    let z1_rows: Vec<&str> = out.lines().filter(|l| l.starts_with("\"Z1")).collect();
    assert_eq!(z1_rows.len(), 10);
    assert!(z1_rows.iter().all(|l| l.ends_with(",true")), "{out}");
}
