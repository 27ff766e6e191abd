use std::path::Path;
use std::process::{Command, Output};

fn puzzlebench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_puzzlebench")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_writes_one_file_per_size() {
    let dir = tempfile::tempdir().unwrap();
    let out = puzzlebench(&["gen", "--puzzle", "blocks", "--n", "2..4", "--stacks", "3", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for n in 2..=4 {
        let text = std::fs::read_to_string(dir.path().join(format!("blocks_n{n}.json"))).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["n"], n);
    }
    assert!(stdout(&out).contains("id=cd7f8721b53b8c22"));
}

#[test]
fn oracle_prints_moves_or_unsolvable() {
    let out = puzzlebench(&["oracle", "--puzzle", "hanoi", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "moves = [[1, 0, 1], [2, 0, 2], [1, 1, 2]]");

    let out = puzzlebench(&["oracle", "--puzzle", "river", "--n", "6", "--k", "3"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stdout(&out).trim(), "UNSOLVABLE");
}

#[test]
fn bad_input_exits_with_usage_code() {
    assert_eq!(puzzlebench(&["oracle", "--puzzle", "hanoi", "--n", "5..1"]).status.code(), Some(2));
    assert_eq!(puzzlebench(&["oracle", "--puzzle", "hanoi", "--n", "2..3"]).status.code(), Some(2));
    assert_eq!(puzzlebench(&["oracle", "--puzzle", "river", "--n", "1"]).status.code(), Some(2));
    assert_eq!(puzzlebench(&["oracle", "--puzzle", "chess", "--n", "3"]).status.code(), Some(2));
}

#[test]
fn missing_manifest_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = puzzlebench(&["run", "--manifest", path(&missing), "--store", path(dir.path())]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn run_refuses_to_overwrite_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"run_id": "cli-run", "sweep": [{"puzzle": "hanoi", "n": "1..3"}],
            "provider": {"provider_kind": "oracle_synthetic", "model_id": "oracle"},
            "samples_per_instance": 2}"#,
    )
    .unwrap();
    let store = dir.path().join("runs");
    let args = ["run", "--manifest", path(&manifest), "--store", path(&store)];
    let first = puzzlebench(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(stdout(&first).contains("6 requested, 6 appended"));

    assert_eq!(puzzlebench(&args).status.code(), Some(2));

    let mut resume = args.to_vec();
    resume.push("--resume");
    let again = puzzlebench(&resume);
    assert!(stdout(&again).contains("6 already complete, 0 requested"));

    let report = dir.path().join("report");
    let out = puzzlebench(&["report", "--runs", path(&store), "--out", path(&report), "--k-list", "1,2"]);
    assert!(out.status.success());
    let accuracy = std::fs::read_to_string(report.join("accuracy.csv")).unwrap();
    assert_eq!(accuracy.lines().count(), 4);
    assert!(accuracy.lines().skip(1).all(|l| l.contains(",1.000000,")));
}

#[test]
fn provider_override_is_validated() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    std::fs::write(
        &manifest,
        r#"{"run_id": "x", "sweep": [{"puzzle": "hanoi", "n": "1"}],
            "provider": {"provider_kind": "oracle_synthetic", "model_id": "oracle"}}"#,
    )
    .unwrap();
    let provider = dir.path().join("p.json");
    std::fs::write(&provider, r#"{"provider_kind": "corrupting_synthetic", "model_id": "c"}"#).unwrap();
    let out = puzzlebench(&["run", "--manifest", path(&manifest), "--provider", path(&provider), "--store", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_on_empty_log_writes_headers_and_empty_charts() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("empty.jsonl");
    std::fs::write(&log, "").unwrap();
    let out_dir = dir.path().join("out");
    let out = puzzlebench(&["report", "--runs", path(&log), "--out", path(&out_dir)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut csvs = 0;
    for entry in std::fs::read_dir(&out_dir).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        if p.extension().unwrap() == "csv" {
            csvs += 1;
            assert_eq!(text.lines().count(), 1, "{}", p.display());
        } else {
            roxmltree::Document::parse(&text).unwrap();
        }
    }
    assert_eq!(csvs, puzzlebench_core::report::table_names().len());
}

#[test]
fn report_rejects_too_few_bins() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("empty.jsonl");
    std::fs::write(&log, "").unwrap();
    let out = puzzlebench(&["report", "--runs", path(&log), "--out", path(dir.path()), "--bins", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
