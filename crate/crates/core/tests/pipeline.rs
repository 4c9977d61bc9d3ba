use std::fs;
use std::path::Path;

use wre_core::pipeline::{run_compute, run_pipeline, run_stats, ExitStatus, PipelineError, RowSource, RunConfig, RUN_MANIFEST_FILE};
use wre_core::report::{from_delimited, TableId};
use wre_core::synthgen::{generate_to_dir, SynthSpec};

fn synth_bundle(dir: &Path, seed: u64, programs_per_cell: usize) {
    generate_to_dir(&SynthSpec::default_corpus(seed, programs_per_cell), dir).unwrap();
}

fn config(input: &Path, out: &Path) -> RunConfig {
    RunConfig {
        input_dir: Some(input.to_path_buf()),
        out_dir: out.to_path_buf(),
        ..RunConfig::default()
    }
}

#[test]
fn synth_bundle_renders_every_table() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 3, 2);
    let cfg = config(&input, &tmp.path().join("out"));
    let summary = run_pipeline(&cfg).unwrap();
    assert_eq!(summary.status, ExitStatus::Success);
    for id in TableId::ALL {
        let text = fs::read_to_string(cfg.out_dir.join(format!("{id}.csv"))).unwrap();
        let table = from_delimited(&text).unwrap();
        assert!(!table.cells.is_empty(), "{id} is empty");
    }
    assert!(cfg.out_dir.join("effects.csv").exists());
    assert!(cfg.out_dir.join("effect_report.json").exists());
    assert!(cfg.out_dir.join(RUN_MANIFEST_FILE).exists());
}

#[test]
fn missing_segments_is_a_parse_failure_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 4, 1);
    fs::remove_file(input.join("segments.jsonl")).unwrap();
    let cfg = config(&input, &tmp.path().join("out"));
    let err = run_pipeline(&cfg).unwrap_err();
    assert_eq!(err.status(), ExitStatus::ParseFailure);
    assert_eq!(err.status().code(), 3);
    assert!(!cfg.out_dir.exists());
}

#[test]
fn dangling_reference_is_a_validation_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 5, 1);
    let mut reports = fs::read_to_string(input.join("reports.csv")).unwrap();
    reports.push_str("no-such-program,expert,1,1\n");
    fs::write(input.join("reports.csv"), reports).unwrap();
    let err = run_pipeline(&config(&input, &tmp.path().join("out"))).unwrap_err();
    assert!(matches!(err, PipelineError::Ingest(_)));
    assert_eq!(err.status(), ExitStatus::ValidationFailure);
    assert_eq!(err.status().code(), 4);
}

#[test]
fn small_population_skips_statistics_with_warning() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 6, 1);
    let mut cfg = config(&input, &tmp.path().join("out"));
    cfg.min_population = 1_000_000;
    let summary = run_pipeline(&cfg).unwrap();
    assert_eq!(summary.status, ExitStatus::EmptyPopulation);
    assert_eq!(summary.status.code(), 5);
    assert!(summary.warnings.iter().any(|w| w.contains("statistics skipped")));
    for id in TableId::ALL {
        assert!(cfg.out_dir.join(format!("{id}.csv")).exists());
    }
    assert!(!cfg.out_dir.join("effects.csv").exists());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.out_dir.join(RUN_MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(manifest["exit_code"], 5);
}

#[test]
fn identical_inputs_give_identical_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 7, 1);
    let out = tmp.path().join("out");
    let first = run_pipeline(&config(&input, &out)).unwrap();
    let snapshot: Vec<(std::path::PathBuf, Vec<u8>)> =
        first.outputs.iter().map(|p| (p.clone(), fs::read(p).unwrap())).collect();
    let second = run_pipeline(&config(&input, &out)).unwrap();
    assert_eq!(first.outputs, second.outputs);
    for (path, bytes) in snapshot {
        assert_eq!(fs::read(&path).unwrap(), bytes, "{} changed", path.display());
    }
}

#[test]
fn digests_follow_input_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 8, 1);
    let out = tmp.path().join("out");
    let before = run_compute(&config(&input, &out)).unwrap().manifest.inputs;
    let again = run_compute(&config(&input, &out)).unwrap().manifest.inputs;
    assert_eq!(before, again);

    // Flip one digit of a break boundary; only the breaks digest may change.
    let path = input.join("breaks.csv");
    let text = fs::read_to_string(&path).unwrap();
    let pos = text.rfind(|c: char| c.is_ascii_digit() && c != '0').unwrap();
    let mut bytes = text.into_bytes();
    bytes[pos] -= 1;
    fs::write(&path, bytes).unwrap();
    let after = run_compute(&config(&input, &out)).unwrap().manifest.inputs;
    for (kind, digest) in &before {
        assert_eq!(digest.sha256 != after[kind].sha256, kind == "breaks", "{kind}");
    }
}

#[test]
fn compute_writes_one_file_per_grouping() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 9, 1);
    let mut cfg = config(&input, &tmp.path().join("out"));
    cfg.set("group-by", "medium+audience;all;ad-context").unwrap();
    let summary = run_compute(&cfg).unwrap();
    assert_eq!(summary.status, ExitStatus::Success);
    let all = from_delimited(&fs::read_to_string(cfg.out_dir.join("groups-all.csv")).unwrap()).unwrap();
    assert_eq!(all.cells.len(), 1);
    assert_eq!(all.cells[0][0], "all");
    let by = from_delimited(&fs::read_to_string(cfg.out_dir.join("groups-medium+audience.csv")).unwrap()).unwrap();
    assert_eq!(by.cells.len(), 4);
    assert!(cfg.out_dir.join("groups-ad-context.csv").exists());
}

#[test]
fn stats_from_exported_rows_match_stats_from_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in");
    synth_bundle(&input, 10, 2);
    let from_corpus = config(&input, &tmp.path().join("a"));
    let first = run_stats(&from_corpus, &RowSource::Corpus).unwrap();
    assert_eq!(first.status, ExitStatus::Success);
    let rows_file = from_corpus.out_dir.join("population.csv");
    let from_rows = config(&input, &tmp.path().join("b"));
    let second = run_stats(&from_rows, &RowSource::File(rows_file)).unwrap();
    assert_eq!(second.status, ExitStatus::Success);
    let a = fs::read_to_string(from_corpus.out_dir.join("effect_report.json")).unwrap();
    let b = fs::read_to_string(from_rows.out_dir.join("effect_report.json")).unwrap();
    assert_eq!(a, b);
}
