use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn toruslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toruslab"))
        .args(args)
        .env_remove("TORUSLAB_PMAX")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn real(v: &Value) -> f64 {
    v.as_str().expect("real as string").parse().unwrap()
}

#[test]
fn analyze_writes_report_and_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let rpt = dir.path().join("rpt.json");
    let env = dir.path().join("env.csv");
    let o = toruslab(&[
        "analyze",
        "--symbol",
        "laplacian:2",
        "--radius",
        "512",
        "--out",
        rpt.to_str().unwrap(),
        "--envelope",
        env.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&rpt).unwrap()).unwrap();
    assert!(real(&v["r_hat_gs"]) <= 0.2);
    assert_eq!(v["census"]["verdict"], "OnlyOrigin");
    let csv = fs::read_to_string(&env).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("l1xi,log_l1xi,abs_p,log_abs_p,loss"));
    assert_eq!(lines.count(), 511);
}

#[test]
fn small_radius_is_a_config_error() {
    let o = toruslab(&["analyze", "--symbol", "laplacian:2", "--radius", "15"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["error"]["kind"], "InvalidArgument");
    assert!(!o.stderr.is_empty());
}

#[test]
fn parse_errors_carry_a_position() {
    let o = toruslab(&["zeros", "--symbol", "vf:alpha=sqrt:x", "--radius", "20"]);
    assert_eq!(o.status.code(), Some(1));
    let v = stdout_json(&o);
    assert!(v["error"]["kind"] == "Parse" || v["error"]["kind"] == "InvalidCoefficient");
}

#[test]
fn missing_flags_produce_error_json() {
    let o = toruslab(&["solve", "--symbol", "heat:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout_json(&o)["error"].is_object());
}

#[test]
fn thread_count_does_not_change_output() {
    let run = |t: &str| toruslab(&["--threads", t, "analyze", "--symbol", "heat:1", "--radius", "200", "--r", "1"]).stdout;
    let one = run("1");
    assert!(!one.is_empty());
    assert_eq!(one, run("4"));
    assert_eq!(one, run("3"));
}

#[test]
fn solve_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let u = dir.path().join("u.json");
    fs::write(
        &f,
        r#"{"n":2,"coeffs":[{"xi":[1,2],"re":"1"},{"xi":[0,1],"re":"1/3","im":"-2"},{"xi":[3,-1],"re":"f:0.25"}]}"#,
    )
    .unwrap();
    let o = toruslab(&[
        "solve",
        "--symbol",
        "heat:1",
        "--rhs",
        f.to_str().unwrap(),
        "--k",
        "0",
        "--r",
        "1",
        "--u-out",
        u.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["norm_report"]["bound_holds"], true);
    let saved: Value = serde_json::from_str(&fs::read_to_string(&u).unwrap()).unwrap();
    assert_eq!(saved, v["u"]);
    assert_eq!(saved["coeffs"].as_array().unwrap().len(), 3);
}

#[test]
fn incompatible_rhs_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"n":2,"coeffs":[{"xi":[3,2],"re":"1"},{"xi":[1,1],"re":"1"}]}"#).unwrap();
    let o = toruslab(&["solve", "--symbol", "vf:alpha=rat:3/2", "--rhs", f.to_str().unwrap(), "--r", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let v = stdout_json(&o);
    assert_eq!(v["error"]["kind"], "Incompatible");
    assert_eq!(v["error"]["violations"], serde_json::json!([[3, 2]]));
    let stderr = String::from_utf8_lossy(&o.stderr);
    assert!(stderr.contains("violation"), "{stderr}");
}

#[test]
fn malformed_rhs_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"{"n":2,"coeffs":[{"xi":[1],"re":"1"}]}"#).unwrap();
    let o = toruslab(&["solve", "--symbol", "heat:1", "--rhs", f.to_str().unwrap(), "--r", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["error"]["kind"], "DimensionMismatch");
}

#[test]
fn witness_kinds() {
    let o = toruslab(&["witness", "--symbol", "vf:alpha=sqrt:2", "--r", "1.5", "--count", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["kind"], "gh");
    assert_eq!(v["bound_holds"], true);
    assert_eq!(v["search"]["witnesses"].as_array().unwrap().len(), 6);

    let o = toruslab(&["witness", "--symbol", "vf:alpha=sqrt:2", "--kind", "closed-range", "--r", "1.5", "--count", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["strictly_decreasing"], true);

    let o = toruslab(&["witness", "--symbol", "vf:alpha=sqrt:2", "--r", "2.5", "--count", "20", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["error"]["kind"], "BudgetExhausted");
}

#[test]
fn zeros_of_a_rational_field() {
    let o = toruslab(&["zeros", "--symbol", "vf:alpha=rat:3/2", "--radius", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let c = &stdout_json(&o)["census"];
    assert_eq!(c["verdict"], "GrowingSuspected");
    assert_eq!(c["zero_total"], 201);
}

#[test]
fn wave_classify_emits_zeros() {
    let o = toruslab(&["wave-classify", "--n", "3", "--eta2", "2/1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["zero_set"], "InfiniteZeros");
    for z in v["zeros"].as_array().unwrap() {
        let c: Vec<i64> = z.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        // τ² = 2‖ξ'‖² on the zero set.
        assert_eq!(c[0] * c[0], 2 * c[1..].iter().map(|x| x * x).sum::<i64>());
    }
    let o = toruslab(&["wave-classify", "--n", "2", "--eta2", "3/1"]);
    assert_eq!(stdout_json(&o)["zero_set"], "NoNonzeroZeros");
}

#[test]
fn dio_reports_expansion_and_registry() {
    let o = toruslab(&["dio", "--alpha", "sqrt:2", "--depth", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let mu = real(&v["mu"]["mu_hat"]);
    assert!((1.9..=2.1).contains(&mu), "{mu}");
    assert_eq!(v["mu"]["expansion"]["determinant_identity"], true);
    assert!(v["registry"].is_object());

    let o = toruslab(&["dio", "--alpha", "pi"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout_json(&o)["mu"].is_null());

    let o = toruslab(&["dio", "--alpha", "nonsense"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seeded_demo_is_reproducible() {
    let a = toruslab(&["dio", "--seed", "11", "--count", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, toruslab(&["dio", "--seed", "11", "--count", "4"]).stdout);
    assert_ne!(a.stdout, toruslab(&["dio", "--seed", "12", "--count", "4"]).stdout);
    let v = stdout_json(&a);
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);
}

#[test]
fn precision_flag_is_bounded() {
    let o = toruslab(&["--precision", "8", "dio", "--alpha", "sqrt:2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_toruslab"))
        .args(["dio", "--alpha", "sqrt:2", "--depth", "5"])
        .env("TORUSLAB_PMAX", "256")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}
