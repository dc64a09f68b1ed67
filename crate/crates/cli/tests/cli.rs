use std::process::{Command, Output};

use ordwalk::terms_walks::WalkTrace;
use ordwalk::Nat;

fn ordwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordwalk"))
        .args(args)
        .env_remove("ORDWALK_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_values() {
    let o = ordwalk(&["eval", "--base", "2", "--ordinal", "w"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3");
    let o = ordwalk(&["eval", "--base", "2", "--ordinal", "w*2"]);
    assert_eq!(stdout(&o).trim(), "17");
}

#[test]
fn eval_cutoff_and_parse_errors() {
    let o = ordwalk(&[
        "eval",
        "--base",
        "2",
        "--ordinal",
        "w^(w)",
        "--cutoff",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("ExceedsCutoff"));
    assert_eq!(
        ordwalk(&["eval", "--base", "2", "--ordinal", "w^("])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ordwalk(&["eval", "--base", "2"]).status.code(), Some(1));
    assert_eq!(
        ordwalk(&["eval", "--base", "1", "--ordinal", "w"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn budget_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ordwalk"))
        .args(["eval", "--base", "2", "--ordinal", "w^(2)"])
        .env("ORDWALK_BUDGET", "10")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn walks() {
    let o = ordwalk(&["walk", "--start", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[4].contains(" 0 "));

    let o = ordwalk(&["walk", "--start", "0"]);
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = ordwalk(&["walk", "--start", "5", "--max-steps", "3"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn walk_json_round_trips() {
    let o = ordwalk(&["walk", "--start", "3", "--emit", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let trace = WalkTrace::from_json(&v).unwrap();
    let values: Vec<Nat> = [3u32, 3, 2, 1, 0].into_iter().map(Nat::from).collect();
    assert_eq!(trace.values(), values);
    assert!(trace.terminated);
    assert_eq!(
        trace.steps[0].assigned.as_ref().unwrap().to_string(),
        "B(W)"
    );
}

#[test]
fn walk_csv() {
    let o = ordwalk(&["walk", "--start", "2", "--emit", "csv"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,base,value,term,ordinal,calls"));
    let values: Vec<&str> = lines.map(|l| l.split(',').nth(2).unwrap()).collect();
    assert_eq!(values, ["2", "1", "0"]);
}

#[test]
fn normal_form() {
    let o = ordwalk(&["nf", "--base", "2", "--value", "4"]);
    assert_eq!(stdout(&o).trim(), "0, w, 3");
}

#[test]
fn bachmann_f_and_g() {
    let o = ordwalk(&["f", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("F(2) = 3"));
    assert_eq!(text.lines().count(), 5);
    let o = ordwalk(&["g", "--n", "1"]);
    assert_eq!(stdout(&o).trim(), "G(1) = 4");
}

#[test]
fn bumps_and_sequences() {
    assert_eq!(
        stdout(&ordwalk(&[
            "bump", "--base", "2", "--target", "w", "--value", "3"
        ]))
        .trim(),
        "B(W)"
    );
    assert_eq!(
        stdout(&ordwalk(&[
            "bump", "--base", "2", "--target", "3", "--value", "5"
        ]))
        .trim(),
        "7"
    );
    assert_eq!(
        ordwalk(&["bump", "--base", "3", "--target", "2", "--value", "5"])
            .status
            .code(),
        Some(1)
    );
    let o = ordwalk(&["fseq", "--ordinal", "w^(2)", "--n", "2"]);
    assert_eq!(stdout(&o), "0: 0\n1: w\n2: w*2\n");
}

#[test]
fn verify_suites() {
    let o = ordwalk(&["verify", "--suite", "maximality", "--level", "smoke"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS maximality"));
    let o = ordwalk(&["verify", "--suite", "bchbigger", "--format", "json"]);
    assert_eq!(o.status.code(), Some(5));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["passed"], false);
    assert_eq!(
        ordwalk(&["verify", "--suite", "nonsense"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_sampling_is_reproducible() {
    let args = [
        "verify", "--suite", "ceil", "--sample", "5", "--seed", "7", "--format", "json",
    ];
    assert_eq!(ordwalk(&args).stdout, ordwalk(&args).stdout);
}
