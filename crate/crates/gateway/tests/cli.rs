//! The `lmui` binary: outputs and exit statuses.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

const ROW7: &str = "I've got 24 cupcakes, and I need to divide them evenly among my 6 friends. How many does each person get?";

fn lmui(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lmui"))
        .args(args)
        .env_remove("LMUI_MANIFEST")
        .output()
        .unwrap()
}

fn data(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("lmui-cli-{}-{name}", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(contents.as_bytes()).unwrap();
    path
}

#[test]
fn parse_prints_row_seven_patch() {
    let out = lmui(&["parse", "--text", ROW7]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"CurrentApp\":\"Calculator\",\"Config\":{\"promptSequence\": \"24/6\"}}\n"
    );
}

#[test]
fn parse_exit_statuses() {
    assert_eq!(lmui(&["parse", "--text", ""]).status.code(), Some(64));
    assert_eq!(lmui(&["parse", "--text", "is it going to rain today"]).status.code(), Some(2));
    assert_eq!(lmui(&["parse"]).status.code(), Some(64));
    assert_eq!(lmui(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(lmui(&["parse", "--manifest", "/no/such/file.json", "--text", "x"]).status.code(), Some(66));
    assert_eq!(lmui(&["--help"]).status.code(), Some(0));
}

#[test]
fn parse_with_explicit_manifest() {
    let out = lmui(&["parse", "--manifest", &data("manifest.json"), "--text", "What's the weather in Oslo, Norway?"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"CurrentApp":"Weather","Config":{"City": "Oslo, Norway"}}"#
    );
}

#[test]
fn validate_reports_duplicates_with_both_paths() {
    assert_eq!(lmui(&["validate", "--manifest", &data("manifest.json")]).status.code(), Some(0));
    let dup = temp_file(
        "dup.json",
        r#"{"apps":[
            {"name":"Weather","description":"weather","parameters":[
                {"name":"City","description":"city","prompt":"Where?"},
                {"name":"City","description":"town","prompt":"Where?"}]}]}"#,
    );
    let out = lmui(&["validate", "--manifest", dup.to_str().unwrap()]);
    std::fs::remove_file(&dup).unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("apps[0].parameters[0]") && err.contains("apps[0].parameters[1]"), "{err}");
}

#[test]
fn validate_flags_ambiguous_siblings() {
    let twins = temp_file(
        "twins.json",
        r#"{"apps":[
            {"name":"A","description":"weather forecast for a city","parameters":[{"name":"X","description":"x","prompt":"?"}]},
            {"name":"B","description":"weather forecast for a city","parameters":[{"name":"Y","description":"y","prompt":"?"}]}]}"#,
    );
    let out = lmui(&["validate", "--manifest", twins.to_str().unwrap()]);
    std::fs::remove_file(&twins).unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("ambiguous: A and B"));
}

#[test]
fn eval_json_and_predictions() {
    let out = lmui(&["eval", "--corpus", &data("corpora/reference.txt")]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["total"]["passes"], 6);
    assert_eq!(report["classification"]["passes"], 7);

    let predictions = temp_file("pred.txt", "\"Address\": \"Apartment 5A, 654 Peachtree Street in New Town\"\n$50-$25\nZurich, Switzerland\n");
    let out = lmui(&[
        "eval",
        "--corpus",
        &data("corpora/extraction.txt"),
        "--predictions",
        predictions.to_str().unwrap(),
        "--format",
        "table",
    ]);
    std::fs::remove_file(&predictions).unwrap();
    assert_eq!(out.status.code(), Some(0));
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.lines().any(|l| l.starts_with("total") && l.contains("0.667")), "{table}");

    assert_eq!(lmui(&["eval", "--corpus", "/no/such/corpus.txt"]).status.code(), Some(66));
}
