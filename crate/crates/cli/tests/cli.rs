use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semitorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_result(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    v["result"].clone()
}

#[test]
fn semigroup_count_example() {
    let out = run(&["semigroup", "count", "--gens", "2,3", "--limit", "100"]);
    assert!(out.status.success());
    assert_eq!(json_result(&out)["count"], 19);
}

#[test]
fn semigroup_density_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("density.csv");
    let out = run(&[
        "semigroup",
        "density",
        "--gens",
        "2,3",
        "--checkpoints",
        "100,10000",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("n,count,density,logDensity\n"));
    assert_eq!(body.lines().count(), 3);
}

#[test]
fn lacunary_output() {
    let out = run(&["semigroup", "lacunary", "--gens", "4,16"]);
    assert!(out.status.success());
    let r = json_result(&out);
    assert_eq!(r["lacunary"], true);
    assert_eq!(r["witness"], 2);
}

#[test]
fn measure_mass_exact_string() {
    let out = run(&[
        "measure",
        "mass",
        "--measure",
        "bernoulli:base=3,probs=1/2,0,1/2",
        "--start",
        "0",
        "--length",
        "1/3",
    ]);
    assert!(out.status.success());
    assert_eq!(json_result(&out)["mass"], "1/2");
}

#[test]
fn measure_invariance_exit_codes() {
    let ok = run(&[
        "measure",
        "invariance",
        "--measure",
        "bernoulli:base=3,probs=1/2,0,1/2",
        "--q",
        "3",
    ]);
    assert!(ok.status.success());
    let bad = run(&[
        "measure",
        "invariance",
        "--measure",
        "bernoulli:base=3,probs=1/2,0,1/2",
        "--q",
        "2",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_result(&bad)["invariant"], false);
}

#[test]
fn malformed_grammar_exits_2_with_rule() {
    let out = run(&["measure", "mass", "--measure", "atomic:oops", "--start", "0", "--length", "1/2"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("atomic measure"), "{msg}");

    let out = run(&["equidist", "weyl", "--set", "1,2", "--alpha", "quadratic:junk", "--limit", "5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reconstruct_verdict_string() {
    let out = run(&[
        "rigidity",
        "reconstruct",
        "--x",
        "1/3",
        "--gens",
        "2,3",
        "--m1",
        "10",
        "--doublings",
        "2",
    ]);
    assert!(out.status.success());
    let r = json_result(&out);
    assert_eq!(r["verdict"], "1/3");
    assert_eq!(r["stages"][0]["M"], 10);
    assert_eq!(r["stages"][0]["delta"], "1/100000");
}

#[test]
fn classify_verdicts() {
    let out = run(&[
        "rigidity",
        "classify",
        "--measure",
        "atomic:[1/7=1/3,2/7=1/3,4/7=1/3]",
        "--gens",
        "2,3",
    ]);
    assert!(out.status.success());
    assert_eq!(json_result(&out)["verdict"], "FiniteSupportDetected");

    let out = run(&["rigidity", "classify", "--measure", "lebesgue", "--gens", "2,3"]);
    assert_eq!(json_result(&out)["verdict"], "LebesgueConsistent");
}

#[test]
fn entropy_lemma1_grid_pow() {
    let out = run(&[
        "entropy",
        "lemma1",
        "--measure",
        "atomic:[1/7=1/3,2/7=1/3,4/7=1/3]",
        "--beta",
        "1/10",
        "--grid-pow",
        "3,11,20",
        "--samples",
        "20",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json_result(&out);
    assert_eq!(r["pass_fraction"], 1.0);
}

#[test]
fn weyl_exact_rational_orbit() {
    let out = run(&[
        "equidist",
        "weyl",
        "--gens",
        "2,3",
        "--alpha",
        "1/4",
        "--limit",
        "10",
        "--h",
        "1",
    ]);
    assert!(out.status.success());
    let re = &json_result(&out)["re"];
    assert!(re["value"].is_string() && re["errorRadius"].is_string());
}

#[test]
fn reports_byte_identical_and_json_file() {
    let args = [
        "entropy",
        "estimate",
        "--measure",
        "bernoulli:base=2,probs=1/4,3/4",
        "--p",
        "2",
        "--n",
        "50",
        "--samples",
        "50",
        "--seed",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    // --json mirrors stdout into the file
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("report.json");
    let mut with_file = args.to_vec();
    with_file.extend(["--json", p.to_str().unwrap()]);
    let out = run(&with_file);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&p).unwrap();
    let v: Value = serde_json::from_str(&written).unwrap();
    assert!(v["result"]["mean"].is_number());
}

#[test]
fn nazarov_run_verify_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = run(&[
        "nazarov",
        "run",
        "--alpha",
        "golden",
        "--stages",
        "1",
        "--json",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let ok = run(&["nazarov", "verify", path.to_str().unwrap()]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    assert_eq!(json_result(&ok)["pass"], true);

    // tamper: drop one generator from the seed snapshot
    let text = std::fs::read_to_string(&path).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    let b = v["result"]["stages"][0]["b"].as_array_mut().unwrap();
    b.pop();
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&v).unwrap()).unwrap();

    let bad = run(&["nazarov", "verify", tampered.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    let checks = json_result(&bad)["checks"].clone();
    let failed: Vec<String> = checks
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert!(!failed.is_empty(), "a violated inequality must be named");
}

#[test]
fn unknown_flag_exits_2() {
    let out = run(&["semigroup", "count", "--gens", "2,3", "--limit", "10", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}
