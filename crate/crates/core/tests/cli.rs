//! The `fuzzwrap` binary: subcommands, files and exit codes.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fuzzwrap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzwrap")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn error_line(output: &Output) -> Value {
    let stderr = String::from_utf8_lossy(&output.stderr);
    serde_json::from_str(stderr.lines().last().unwrap()).unwrap()
}

#[test]
fn train_twice_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let labels = common::listing_dir().join("labels.json");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let run = fuzzwrap(&["train", "--labels", path(&labels), "--out", path(out)]);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let library = fuzzwrap::train(&common::listing_pages(), &fuzzwrap::WrapperConfig::default()).unwrap();
    assert_eq!(fs::read_to_string(&a).unwrap(), library.to_json());
}

#[test]
fn extract_writes_result() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let result = dir.path().join("out/result.json");
    let labels = common::listing_dir().join("labels.json");
    assert!(fuzzwrap(&["train", "--labels", path(&labels), "--out", path(&model), "--first", "3"]).status.success());
    let page = common::listing_dir().join("listing_b.html");
    let run = fuzzwrap(&["extract", "--model", path(&model), "--page", path(&page), "--out", path(&result)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let value: Value = serde_json::from_str(&fs::read_to_string(&result).unwrap()).unwrap();
    assert_eq!(value["page_id"], "listing_b");
    assert_eq!(value["tuples"].as_array().unwrap().len(), 4);
    assert_eq!(value["tuples"][1]["attributes"]["country"][0]["text"], "Peru");

    let stdout = fuzzwrap(&["extract", "--model", path(&model), "--page", path(&page)]);
    let printed: Value = serde_json::from_slice(&stdout.stdout).unwrap();
    assert_eq!(printed, value);
}

#[test]
fn missing_model_exits_2() {
    let page = common::listing_dir().join("listing_a.html");
    let run = fuzzwrap(&["extract", "--model", "/nonexistent/model.json", "--page", path(&page)]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(error_line(&run)["error"], "InputNotFound");
}

#[test]
fn usage_errors_exit_2() {
    let run = fuzzwrap(&["train", "--out", "x.json"]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(error_line(&run)["error"], "UsageError");
    assert_eq!(fuzzwrap(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fuzzwrap(&["--help"]).status.code(), Some(0));
}

#[test]
fn invalid_labels_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let source = common::listing_dir();
    fs::copy(source.join("listing_a.html"), dir.path().join("listing_a.html")).unwrap();
    let mut labels: Value = serde_json::from_str(&fs::read_to_string(source.join("labels.json")).unwrap()).unwrap();
    let pages = labels["pages"].as_array_mut().unwrap();
    pages.truncate(1);
    let second = pages[0]["records"][1][0].clone();
    pages[0]["records"][0][1] = Value::from(second.as_u64().unwrap() + 2);
    let file = dir.path().join("labels.json");
    fs::write(&file, labels.to_string()).unwrap();

    let run = fuzzwrap(&["label", "validate", "--labels", path(&file)]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(error_line(&run)["error"], "OverlappingSpans");
    let report: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(report["ok"], false);
    assert_eq!(report["offset"], second);

    let run = fuzzwrap(&["train", "--labels", path(&file), "--out", path(&dir.path().join("m.json"))]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(error_line(&run)["error"], "TrainError");
}

#[test]
fn validate_fixture_labels() {
    let labels = common::listing_dir().join("labels.json");
    let run = fuzzwrap(&["label", "validate", "--labels", path(&labels)]);
    assert!(run.status.success());
    assert_eq!(String::from_utf8_lossy(&run.stdout).lines().count(), 3);
}

#[test]
fn corpus_gen_train_eval() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let model = dir.path().join("model.json");
    let report = dir.path().join("report.json");
    let run = fuzzwrap(&["corpus", "gen", "--profile", "regular", "--seed", "7", "--pages", "10", "--out", path(&corpus)]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(corpus.join("page_009.html").exists());

    let labels = corpus.join("labels.json");
    assert!(fuzzwrap(&["train", "--labels", path(&labels), "--first", "3", "--out", path(&model)]).status.success());
    let run = fuzzwrap(&[
        "eval", "--model", path(&model), "--corpus", path(&corpus), "--baseline", "3", "--out", path(&report),
        "--log-level", "info",
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let table = String::from_utf8_lossy(&run.stdout);
    assert!(table.lines().any(|l| l.starts_with("Recall") && l.contains("1.000")), "{table}");
    let value: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(value["fuzzy"]["recall"], 1.0);
    assert_eq!(value["fuzzy"]["precision"], 1.0);
    assert!(value["baseline"]["recall"].is_number());

    let again = dir.path().join("again");
    fuzzwrap(&["corpus", "gen", "--profile", "regular", "--seed", "7", "--pages", "10", "--out", path(&again)]);
    assert_eq!(fs::read(corpus.join("labels.json")).unwrap(), fs::read(again.join("labels.json")).unwrap());
}

#[test]
fn eval_on_missing_corpus_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let labels = common::listing_dir().join("labels.json");
    assert!(fuzzwrap(&["train", "--labels", path(&labels), "--out", path(&model)]).status.success());
    let run = fuzzwrap(&["eval", "--model", path(&model), "--corpus", "/nonexistent/corpus"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn unknown_profile_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let run = fuzzwrap(&["corpus", "gen", "--profile", "weird", "--out", path(dir.path())]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(error_line(&run)["error"], "UnknownProfile");
}

#[test]
fn serve_uses_store_from_environment() {
    use std::io::{Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::time::{Duration, Instant};

    let dir = tempfile::tempdir().unwrap();
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut child = Command::new(env!("CARGO_BIN_EXE_fuzzwrap"))
        .args(["serve", "--port", &port.to_string()])
        .env(fuzzwrap::store::STORE_ENV, dir.path())
        .spawn()
        .unwrap();

    let started = Instant::now();
    let response = loop {
        if let Ok(mut stream) = TcpStream::connect(("127.0.0.1", port)) {
            stream
                .write_all(b"GET /pages/0000000000000000 HTTP/1.1\r\nHost: x\r\nConnection: close\r\n\r\n")
                .unwrap();
            let mut text = String::new();
            stream.read_to_string(&mut text).unwrap();
            break text;
        }
        assert!(started.elapsed() < Duration::from_secs(10), "server did not start");
        std::thread::sleep(Duration::from_millis(20));
    };
    child.kill().unwrap();
    child.wait().unwrap();
    assert!(response.starts_with("HTTP/1.1 404"), "{response}");
    assert!(response.contains("UnknownPage"));
    assert!(dir.path().join("index.json").exists());
}
