mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sugarmine(args: &[&str], corpus: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sugarmine"))
        .args(args)
        .arg("--corpus")
        .arg(corpus)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn corpus(dir: &Path, getters: usize) -> std::path::PathBuf {
    let c = common::planted_corpus(31, 4, 12, getters);
    let root = dir.join("corpus");
    common::write_files(&root, &c.files);
    root
}

fn jsonl(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn pipeline_writes_every_artifact_with_a_schema_version() {
    let dir = tempfile::tempdir().unwrap();
    let root = corpus(dir.path(), 4);
    let out = dir.path().join("out");
    let o = sugarmine(&["pipeline", "--max-size", "3"], &root, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("calibration"), "{stdout}");

    for rel in ["cfgs.jsonl", "generalized/gcfgs.jsonl", "generalized/patterns.jsonl", "generalized/verdicts.jsonl", "generalized/census-examples.jsonl"] {
        let rows = jsonl(&out.join(rel));
        assert!(!rows.is_empty(), "{rel} is empty");
        assert!(rows.iter().all(|r| r["schema_version"] == 1), "{rel} lacks schema_version");
    }
    for rel in ["ingest-report.json", "generalized/run.json", "generalized/calibration.json"] {
        let v: Value = serde_json::from_str(&std::fs::read_to_string(out.join(rel)).unwrap()).unwrap();
        assert_eq!(v["schema_version"], 1, "{rel}");
    }
    let metrics = std::fs::read_to_string(out.join("generalized/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().next().unwrap(), "size,total,investigated,median_freq,sugarable,new_sugars,unique_sugars");
    let census = std::fs::read_to_string(out.join("generalized/census.csv")).unwrap();
    assert_eq!(census.lines().count(), 8);
    assert!(census.lines().skip(1).all(|l| l.ends_with(",4")), "{census}");
    assert!(!out.join("baseline").exists());
}

#[test]
fn modes_write_separate_directories() {
    let dir = tempfile::tempdir().unwrap();
    let root = corpus(dir.path(), 4);
    let out = dir.path().join("out");
    assert!(sugarmine(&["pipeline", "--max-size", "2"], &root, &out).status.success());
    let generalized = std::fs::read(out.join("generalized/patterns.jsonl")).unwrap();
    let o = sugarmine(&["pipeline", "--mode", "baseline", "--min-support", "0.2", "--max-size", "2"], &root, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("baseline/bcfgs.jsonl").exists());
    assert!(!out.join("baseline/gcfgs.jsonl").exists());
    assert_eq!(std::fs::read(out.join("generalized/patterns.jsonl")).unwrap(), generalized);
    let run: Value = serde_json::from_str(&std::fs::read_to_string(out.join("baseline/run.json")).unwrap()).unwrap();
    assert_eq!(run["mode"], "baseline");
    assert_eq!(run["threshold"]["source"], "override");
}

#[test]
fn stages_can_run_one_by_one() {
    let dir = tempfile::tempdir().unwrap();
    let root = corpus(dir.path(), 4);
    let out = dir.path().join("out");
    for stage in [&["ingest"][..], &["calibrate"], &["mine", "--max-size", "2"], &["filter"], &["metrics"], &["census"]] {
        let o = sugarmine(stage, &root, &out);
        assert!(o.status.success(), "{stage:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let staged = std::fs::read(out.join("generalized/patterns.jsonl")).unwrap();
    let again = dir.path().join("again");
    assert!(sugarmine(&["pipeline", "--max-size", "2"], &root, &again).status.success());
    assert_eq!(std::fs::read(again.join("generalized/patterns.jsonl")).unwrap(), staged);
    assert_eq!(
        std::fs::read(out.join("generalized/metrics.csv")).unwrap(),
        std::fs::read(again.join("generalized/metrics.csv")).unwrap()
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir_all(&empty).unwrap();
    let o = sugarmine(&["pipeline"], &empty, &dir.path().join("o1"));
    assert_eq!(o.status.code(), Some(2));

    // No getters and no other calibration sugar: calibration cannot pick a threshold.
    let root = corpus(dir.path(), 0);
    let o = sugarmine(&["pipeline"], &root, &dir.path().join("o2"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--min-support"));
    let o = sugarmine(&["pipeline", "--min-support", "0.25", "--max-size", "2"], &root, &dir.path().join("o2"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let o = sugarmine(&["pipeline", "--min-support", "1.5"], &root, &dir.path().join("o3"));
    assert_eq!(o.status.code(), Some(1));
    let o = sugarmine(&["filter"], &root, &dir.path().join("missing"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn ingest_is_byte_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/frontend");
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out = dir.path().join(format!("t{threads}"));
        let o = sugarmine(&["ingest", "--threads", threads], &fixture, &out);
        assert!(o.status.success());
        outputs.push((std::fs::read(out.join("cfgs.jsonl")).unwrap(), std::fs::read(out.join("ingest-warnings.jsonl")).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(String::from_utf8_lossy(&outputs[0].1).lines().count(), 1);
}
