//! End-to-end checks of the command-line interface: exit-code conventions,
//! JSON round trips, and output determinism.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn addext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addext"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn addext_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_addext"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary spawns");
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.as_bytes())
        .unwrap();
    child.wait_with_output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn make_pipes_into_check_code() {
    for make_args in [
        vec!["make", "example1"],
        vec!["make", "counterexample", "--p", "2", "--s", "1", "--m", "2"],
        vec!["make", "rs", "--n", "3", "--kl", "2"],
    ] {
        let made = addext(&make_args);
        assert!(made.status.success(), "{make_args:?}");
        let checked = addext_stdin(&["check-code", "--code", "-"], &stdout(&made));
        assert_eq!(checked.status.code(), Some(0), "{make_args:?}");
    }
}

#[test]
fn extend_distinguishes_the_two_named_maps() {
    let ex2 = stdout(&addext(&[
        "make",
        "counterexample",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "2",
    ]));
    let out = addext_stdin(&["extend", "--map", "-"], &ex2);
    assert_eq!(out.status.code(), Some(1), "verified-false decision");
    let text = stdout(&out);
    assert!(text.contains("extends: false"));
    assert!(text.contains("V dims: [1, 1, 1]"));
    assert!(text.contains("U dims: [0, 2, 2]"));

    let ex1 = stdout(&addext(&["make", "example1"]));
    let out = addext_stdin(&["extend", "--map", "-", "--witness"], &ex1);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("extends: true"));
    assert!(text.contains("witness:"));
}

#[test]
fn extend_json_carries_both_tuples() {
    let ex2 = stdout(&addext(&[
        "make",
        "counterexample",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "2",
    ]));
    let out = addext_stdin(&["extend", "--map", "-", "--json"], &ex2);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["extends"], serde_json::json!(false));
    assert_eq!(v["v_dims"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["u_dims"], serde_json::json!([0, 2, 2]));
}

#[test]
fn check_map_exit_codes() {
    let ex1 = stdout(&addext(&["make", "example1"]));
    let out = addext_stdin(&["check-map", "--map", "-"], &ex1);
    assert_eq!(out.status.code(), Some(0));

    // break the first image: weight 2 becomes weight 1
    let broken = ex1.replace("[0,3,2]", "[1,0,0]");
    let out = addext_stdin(&["check-map", "--map", "-"], &broken);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("isometry: false"));
}

#[test]
fn sigma_prints_minimum_partition_and_bound() {
    let out = addext(&["sigma", "--p", "2", "--s", "1", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("sigma(2, m=3) = 5"));
    assert!(text.contains("lower bound"));
    assert!(text.contains("attaining partition"));
}

#[test]
fn verify_pass_and_hypothesis_violation() {
    let out = addext(&[
        "verify",
        "--theorem",
        "lemma_mds",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "2",
        "--n",
        "3",
        "--kl",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pass"));

    // short-length claim with n > q cannot be run
    let out = addext(&[
        "verify",
        "--theorem",
        "prop1",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "2",
        "--n",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3), "could-not-decide exit code");
}

#[test]
fn scan_threshold_runs() {
    let out = addext(&[
        "scan-threshold",
        "--p",
        "2",
        "--s",
        "1",
        "--k",
        "2",
        "--n-max",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("n=2: no nontrivial solutions"));
    assert!(text.contains("n=3: 1 nontrivial solution pairs"));
}

#[test]
fn usage_and_input_errors() {
    let out = addext(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));

    let out = addext_stdin(&["check-code", "--code", "-"], "{not json");
    assert_eq!(out.status.code(), Some(2));

    // a field fragment with a reducible modulus is rejected with context
    let bad = r#"{"field":{"p":2,"k_poly":[0,1],"l_poly":[[0],[1],[1]]},"n":1,"generators":[[1]]}"#;
    let out = addext_stdin(&["check-code", "--code", "-"], bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = [
        "verify",
        "--theorem",
        "prop4",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "4",
        "--n",
        "4",
        "--kl",
        "2",
        "--budget",
        "1048576",
        "--json",
    ];
    let a = addext(&args);
    let b = addext(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());

    let sampled = [
        "verify",
        "--theorem",
        "prop3",
        "--p",
        "2",
        "--s",
        "1",
        "--m",
        "2",
        "--n",
        "3",
        "--kl",
        "1",
        "--mode",
        "sampled",
        "--seed",
        "7",
        "--samples",
        "200",
        "--json",
    ];
    let a = addext(&sampled);
    let b = addext(&sampled);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn galois_only_mode_is_available_for_comparison() {
    let ex1 = stdout(&addext(&["make", "example1"]));
    let out = addext_stdin(
        &["extend", "--map", "-", "--witness", "--galois-only"],
        &ex1,
    );
    // the tuple decision is unchanged; only the witness pool shrinks
    assert_eq!(out.status.code(), Some(0));
}
