use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wre(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wre")).args(args).output().expect("run wre")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn synth(dir: &Path, extra: &[&str]) {
    let mut args = vec!["synth", "--out", dir.to_str().unwrap(), "--seed", "21", "--programs-per-cell", "1"];
    args.extend_from_slice(extra);
    let out = wre(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn synth_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let out_dir = tmp.path().join("out");
    synth(&input, &[]);
    assert!(input.join("truth.json").exists());
    let out = wre(&["report", "--input-dir", input.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for t in 1..=6 {
        assert!(out_dir.join(format!("table{t}.csv")).exists());
    }
    assert!(out_dir.join("run_manifest.json").exists());
}

#[test]
fn ingest_check_prints_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth(&input, &[]);
    let out = wre(&["ingest-check", "--input-dir", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["counts"]["programs"], 40);
    assert_eq!(v["inputs"]["segments"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn missing_segments_exits_with_parse_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let out_dir = tmp.path().join("out");
    synth(&input, &[]);
    fs::remove_file(input.join("segments.jsonl")).unwrap();
    let out = wre(&["report", "--input-dir", input.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!out_dir.exists());
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let out_dir = tmp.path().join("out");
    synth(&input, &[]);
    let conf = tmp.path().join("run.conf");
    fs::write(
        &conf,
        format!(
            "# test run\ninput-dir = {}\nout-dir = {}\nformat = aligned-text\nmin-population = 1000000\n",
            input.display(),
            out_dir.display()
        ),
    )
    .unwrap();
    let out = wre(&["report", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 5);
    assert!(String::from_utf8_lossy(&out.stderr).contains("statistics skipped"));
    assert!(out_dir.join("table4.txt").exists());
    assert!(!out_dir.join("effects.txt").exists());

    let out = wre(&["report", "--config", conf.to_str().unwrap(), "--min-population", "1"]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("effects.txt").exists());
}

#[test]
fn invalid_values_are_usage_errors() {
    assert_eq!(code(&wre(&["report", "--input-dir", "x", "--min-vad", "1.5"])), 2);
    assert_eq!(code(&wre(&["report", "--input-dir", "x", "--tables", "table9"])), 2);
    assert_eq!(code(&wre(&["report", "--no-such-flag"])), 2);
}

#[test]
fn stats_from_rows_file() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let out_dir = tmp.path().join("out");
    synth(&input, &["--population", "2000"]);
    let rows = input.join("population.csv");
    let out = wre(&[
        "stats",
        "--rows",
        rows.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--format",
        "structured",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let table: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("effects.json")).unwrap()).unwrap();
    let gender = table["cells"].as_array().unwrap().iter().find(|r| r[0] == "speaker_gender").unwrap();
    assert_eq!(gender[7], "yes");
}

#[test]
fn compute_with_groupings() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    let out_dir = tmp.path().join("out");
    synth(&input, &[]);
    let out = wre(&[
        "compute",
        "--input-dir",
        input.to_str().unwrap(),
        "--out-dir",
        out_dir.to_str().unwrap(),
        "--group-by",
        "medium+status;category",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out_dir.join("groups-medium+status.csv").exists());
    assert!(out_dir.join("groups-category.csv").exists());
}
