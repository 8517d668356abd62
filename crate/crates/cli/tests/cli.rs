use std::process::{Command, Output};

use serde_json::Value as Json;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fqapprox"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Json {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn cf_expand_of_a_rational() {
    let out = run(&["cf", "expand", "--field", "p=3,r=1", "--x", "(T^2+1)/T"]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["result"]["quotients"], serde_json::json!(["T", "T"]));
    assert_eq!(j["config"]["run"]["field"], "p=3,r=1,mod=0,1");
}

#[test]
fn dirichlet_test_on_the_all_t_stream_fails_everywhere() {
    let out = run(&[
        "dirichlet",
        "test",
        "--field",
        "p=3,r=1",
        "--cf",
        "T,T,T,...",
        "--psi",
        "gamma=-1,n=1",
        "--nmax",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["result"]["all_fail"], true);
    assert_eq!(j["result"]["rows"].as_array().unwrap().len(), 10);
}

#[test]
fn tsv_output_has_a_config_header() {
    let out = run(&[
        "--format",
        "tsv",
        "dirichlet",
        "test",
        "--cf",
        "T,...",
        "--psi",
        "n=1",
        "--nmax",
        "3",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# config {"));
    assert_eq!(lines[1], "n\tdeg_q\tlhs\tthreshold\tpass\teq3");
    assert_eq!(lines.len(), 5);
}

#[test]
fn garbage_is_a_usage_error() {
    assert_eq!(run(&["cf", "expand", "--x", "garbage"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&[
            "construct",
            "build",
            "--surface",
            "{}",
            "--phi",
            "n=3",
            "--stages",
            "x",
            "--precision",
            "8"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn domain_errors_carry_a_kind() {
    let out = run(&["dirichlet", "test", "--x", "(T^2+1)/T", "--psi", "n=1", "--nmax", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "RationalDetected");
}

#[test]
fn build_then_verify_round_trips_through_a_file() {
    let surface = r#"{"kind":"quadratic","rows":[["0","1","0","0","0","0"]]}"#;
    let out = run(&[
        "construct",
        "build",
        "--surface",
        surface,
        "--phi",
        "n=3",
        "--stages",
        "4",
        "--seed",
        "0b101",
        "--precision",
        "40",
        "--guard-height",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let point = json(&out)["result"].clone();
    assert_eq!(point["seed"], 5);
    let path = std::env::temp_dir().join(format!("fqapprox-point-{}.json", std::process::id()));
    std::fs::write(&path, point.to_string()).unwrap();
    let at = format!("@{}", path.display());
    let m = point["certificate"]["M"].as_i64().unwrap().min(5).to_string();
    let v = run(&["verify", "--point", &at, "--M", &m, "--H", "2"]);
    assert_eq!(v.status.code(), Some(0), "{}", String::from_utf8_lossy(&v.stdout));
    assert_eq!(json(&v)["result"]["pass"], true);
    let too_tall = run(&["construct", "verify", "--point", &at, "--M", &m, "--H", "9"]);
    assert_eq!(too_tall.status.code(), Some(1));
    assert_eq!(json(&too_tall)["error"]["kind"], "VerificationFailed");
    std::fs::write(&path, String::from_utf8(out.stdout).unwrap()).unwrap();
    let whole = run(&["verify", "--point", &at, "--M", &m, "--H", "2"]);
    assert_eq!(
        whole.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&whole.stdout)
    );
    std::fs::remove_file(path).ok();
}

#[test]
fn classify_with_checks() {
    let surface = r#"{"kind":"quadratic","rows":[["1","0","0","0","0","0"]]}"#;
    let out = run(&[
        "intersect",
        "classify",
        "--surface",
        surface,
        "--hyperplane",
        "0,T,1,0",
        "--check",
        "--grid",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let j = json(&out);
    assert_eq!(j["result"]["class"], "SmoothEverywhere");
    assert_eq!(j["result"]["check"]["grid"]["pass"], true);
}

#[test]
fn selftest_is_byte_identical() {
    let a = run(&["selftest", "--seed", "7"]);
    let b = run(&["selftest", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["result"]["checks"].as_array().unwrap().len(), 9);
}
