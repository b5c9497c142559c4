use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use powerdex::gen;
use powerdex::io::{self, ModelSpec};
use powerdex::FeatureSpace;
use serde_json::Value;
use std::sync::Arc;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn powerdex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powerdex"))
        .current_dir(fixtures())
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

const AND: [&str; 6] = [
    "--model",
    "and_model.json",
    "--dist",
    "and_dist.json",
    "--instance",
    "and_instance.json",
];

fn with<'a>(cmd: &'a str, base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(base);
    v.extend_from_slice(extra);
    v
}

/// Writes a random tree on `n` binary features plus a distribution and instance.
fn write_tree_fixture(dir: &Path, n: usize, seed: u64) -> [PathBuf; 3] {
    let mut rng = gen::rng(seed);
    let space = Arc::new(FeatureSpace::binary(n).unwrap());
    let tree = gen::random_tree_on(&mut rng, &space);
    let dist = gen::random_distribution(&mut rng, &space);
    let e = gen::random_instance(&mut rng, &space);
    let paths = [dir.join("model.json"), dir.join("dist.json"), dir.join("instance.json")];
    std::fs::write(&paths[0], io::to_pretty(&io::model_json(&ModelSpec::Tree(tree)))).unwrap();
    std::fs::write(&paths[1], io::to_pretty(&io::distribution_json(&dist))).unwrap();
    std::fs::write(&paths[2], io::to_pretty(&io::instance_json(&e))).unwrap();
    paths
}

#[test]
fn attribute_matches_golden_and_is_repeatable() {
    let args = with("attribute", &AND, &["--scheme", "shapley.json"]);
    let first = powerdex(&args);
    let second = powerdex(&args);
    let golden = std::fs::read(fixtures().join("and_shapley.golden.json")).unwrap();
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, golden);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = powerdex(&with(
        "attribute",
        &AND,
        &["--scheme", "shapley.json", "--out", target.to_str().unwrap()],
    ));
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let golden = std::fs::read(fixtures().join("and_shapley.golden.json")).unwrap();
    assert_eq!(std::fs::read(target).unwrap(), golden);
}

#[test]
fn inline_scheme_and_thread_limit_do_not_change_output() {
    let golden = std::fs::read(fixtures().join("and_shapley.golden.json")).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_powerdex"))
        .current_dir(fixtures())
        .env("POWERDEX_THREADS", "1")
        .args(with("attribute", &AND, &["--scheme", r#"{"preset":"shapley"}"#]))
        .output()
        .unwrap();
    assert_eq!(out.stdout, golden);

    let bad = Command::new(env!("CARGO_BIN_EXE_powerdex"))
        .current_dir(fixtures())
        .env("POWERDEX_THREADS", "zero")
        .args(with("attribute", &AND, &["--scheme", "shapley.json"]))
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}

#[test]
fn banzhaf_takes_the_direct_path() {
    let v = json(&powerdex(&with(
        "attribute",
        &AND,
        &["--scheme", r#"{"preset":"banzhaf"}"#],
    )));
    assert_eq!(v["path"], "bernoulli-direct");
    assert_eq!(v["calls_per_feature"], serde_json::json!([2, 2]));
    assert_eq!(v["values"], serde_json::json!(["3/8", "3/8"]));
}

#[test]
fn constant_model_gets_zero_everywhere() {
    let v = json(&powerdex(&[
        "attribute",
        "--model",
        "constant_model.json",
        "--from-csv",
        "and_rows.csv",
        "--instance",
        "and_instance.json",
        "--scheme",
        r#"{"q":["1/4","3/4"]}"#,
    ]));
    for value in v["values"].as_array().unwrap() {
        assert_eq!(value, "0");
    }
}

#[test]
fn singleton_interaction_equals_attribution() {
    let attr = json(&powerdex(&with("attribute", &AND, &["--scheme", "shapley.json"])));
    let inter = json(&powerdex(&with(
        "interact",
        &AND,
        &["--scheme", "shapley.json", "--set", "b"],
    )));
    assert_eq!(inter["value"], attr["values"][1]);
    assert_eq!(inter["engine_calls"], 4);
}

#[test]
fn additive_model_has_no_pair_interaction() {
    let v = json(&powerdex(&[
        "interact",
        "--model",
        "additive_model.json",
        "--from-csv",
        "additive_data.csv",
        "--instance",
        "additive_instance.json",
        "--scheme",
        r#"{"preset":"banzhaf"}"#,
        "--set",
        "age,smoker",
        "--diag",
    ]));
    assert_eq!(v["value"], "0");
    assert!(v.get("grid_coefficients").is_some());
}

#[test]
fn oracle_check_passes_on_twelve_features() {
    let dir = tempfile::tempdir().unwrap();
    let [m, d, e] = write_tree_fixture(dir.path(), 12, 77);
    let out = powerdex(&[
        "oracle-check",
        "--model",
        m.to_str().unwrap(),
        "--dist",
        d.to_str().unwrap(),
        "--instance",
        e.to_str().unwrap(),
        "--scheme",
        "shapley.json",
        "--set",
        "x1,x2",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn oracle_check_refuses_thirteen_features() {
    let dir = tempfile::tempdir().unwrap();
    let [m, d, e] = write_tree_fixture(dir.path(), 13, 78);
    let out = powerdex(&[
        "oracle-check",
        "--model",
        m.to_str().unwrap(),
        "--dist",
        d.to_str().unwrap(),
        "--instance",
        e.to_str().unwrap(),
        "--scheme",
        "shapley.json",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn converse_recovers_expectation() {
    let v = json(&powerdex(&with("converse", &AND, &["--scheme", "shapley.json"])));
    assert_eq!(v["recovered"], "1/4");
    assert_eq!(v["equal"], true);
    assert_eq!(v["coalition_sums_match"], true);
}

#[test]
fn converse_with_marginal_weights_is_a_scheme_error() {
    let out = powerdex(&with("converse", &AND, &["--scheme", r#"{"preset":"marginal"}"#]));
    assert_eq!(code(&out), 3);
}

#[test]
fn unnormalized_weights_are_a_scheme_error() {
    let out = powerdex(&with("attribute", &AND, &["--scheme", r#"{"q":["1/2","1/4"]}"#]));
    assert_eq!(code(&out), 3);
}

#[test]
fn bad_inputs_are_schema_errors() {
    for csv in ["bad_value.csv", "bad_header.csv", "empty.csv"] {
        let out = powerdex(&["ingest", "--model", "and_model.json", "--from-csv", csv]);
        assert_eq!(code(&out), 2, "{csv}");
    }
    let missing = powerdex(&with(
        "attribute",
        &["--model", "nope.json"],
        &["--dist", "and_dist.json"],
    ));
    assert_eq!(code(&missing), 2);
    let bad_value = powerdex(&["ingest", "--model", "and_model.json", "--from-csv", "bad_value.csv"]);
    assert!(String::from_utf8_lossy(&bad_value.stderr).contains("line"));
}

#[test]
fn ingest_and_expected() {
    let v = json(&powerdex(&[
        "ingest",
        "--model",
        "and_model.json",
        "--from-csv",
        "and_rows.csv",
    ]));
    assert!(v["marginals"]["a"].is_object());
    let e = json(&powerdex(&[
        "expected",
        "--model",
        "constant_model.json",
        "--dist",
        "and_dist.json",
    ]));
    assert_eq!(e["expected_value"], "5/2");
}

#[test]
fn pair_interaction_with_top_row_weights() {
    let v = json(&powerdex(&with(
        "interact",
        &AND,
        &["--scheme", r#"{"q":{"m":2,"values":["1"]}}"#, "--set", "a,b"],
    )));
    assert_eq!(v["value"], "1/4");
    assert_eq!(v["engine_calls"], 3);
}

#[test]
fn oracle_check_passes_on_and() {
    let out = powerdex(&with(
        "oracle-check",
        &AND,
        &["--scheme", "shapley.json", "--set", "a,b"],
    ));
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["pass"], true);
}

#[test]
fn ingest_counts_rows() {
    let v = json(&powerdex(&[
        "ingest",
        "--model",
        "and_model.json",
        "--from-csv",
        "skewed_rows.csv",
    ]));
    assert_eq!(v["marginals"]["a"]["1"], "3/4");
    assert_eq!(v["marginals"]["b"]["0"], "1/2");
    let single = json(&powerdex(&[
        "ingest",
        "--model",
        "and_model.json",
        "--from-csv",
        "single_row.csv",
    ]));
    assert_eq!(single["marginals"]["a"]["1"], "1");
    assert_eq!(single["marginals"]["b"]["1"], "0");
}

#[test]
fn banzhaf_converse_on_a_random_tree() {
    let dir = tempfile::tempdir().unwrap();
    let [m, d, e] = write_tree_fixture(dir.path(), 4, 91);
    let out = powerdex(&[
        "converse",
        "--model",
        m.to_str().unwrap(),
        "--dist",
        d.to_str().unwrap(),
        "--instance",
        e.to_str().unwrap(),
        "--scheme",
        r#"{"preset":"banzhaf"}"#,
    ]);
    let v = json(&out);
    assert_eq!(v["equal"], true);
    assert_eq!(v["recovered"], v["direct"]);
}
