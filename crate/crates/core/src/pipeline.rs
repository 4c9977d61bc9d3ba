//! Run configuration and the end-to-end pipeline: ingest, name extraction,
//! aggregation, statistics and report files, plus an audit manifest.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::align::{select_stats_population, AlignError, AlignThresholds, PopulationConfig};
use crate::ingest::{validate_bundle, BundleCounts, BundlePaths, CorpusBundle, IngestError, ValidationReport};
use crate::metrics::{aggregate, Dimension, FaceRule, Grouping, MetricsConfig, SpanMode, Weighting};
use crate::model::{resolve_local, CorpusCalendar, PeakWindow};
use crate::namex::{CorpusNameStats, NameExtractor};
use crate::report::{build_table, effects_table, groups_table, OutputFormat, ReportError, ReportInputs, Table, TableId};
use crate::stats::{effect_report, read_rows, write_rows, AnalysisRow, EffectReport, StatsError};

pub const RUN_MANIFEST_FILE: &str = "run_manifest.json";
pub const POPULATION_FILE: &str = "population.csv";
pub const EFFECT_REPORT_FILE: &str = "effect_report.json";
pub const DEFAULT_MIN_POPULATION: usize = 100;

/// Process exit status of a pipeline step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExitStatus {
    Success,
    Failure,
    Usage,
    ParseFailure,
    ValidationFailure,
    /// Outputs written, statistics skipped.
    EmptyPopulation,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            ExitStatus::Success => 0,
            ExitStatus::Failure => 1,
            ExitStatus::Usage => 2,
            ExitStatus::ParseFailure => 3,
            ExitStatus::ValidationFailure => 4,
            ExitStatus::EmptyPopulation => 5,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Align(#[from] AlignError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl PipelineError {
    pub fn status(&self) -> ExitStatus {
        match self {
            PipelineError::Config(_) => ExitStatus::Usage,
            PipelineError::Ingest(e) if e.is_validation() => ExitStatus::ValidationFailure,
            PipelineError::Ingest(_) => ExitStatus::ParseFailure,
            PipelineError::Stats(StatsError::InvalidRow { .. } | StatsError::Csv(_)) => ExitStatus::ParseFailure,
            _ => ExitStatus::Failure,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn config_err(key: &str, value: &str, why: impl std::fmt::Display) -> PipelineError {
    PipelineError::Config(format!("{key} = {value:?}: {why}"))
}

/// Every tunable of a run. Defaults reproduce the reference study setup.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input_dir: Option<PathBuf>,
    pub names: Option<PathBuf>,
    pub programs: Option<PathBuf>,
    pub reports: Option<PathBuf>,
    pub breaks: Option<PathBuf>,
    pub segments: Option<PathBuf>,
    pub utterances: Option<PathBuf>,
    pub faces: Option<PathBuf>,
    pub timezone: Tz,
    pub tv_peak: PeakWindow,
    pub radio_peak: PeakWindow,
    pub conflict_cutoff: NaiveDateTime,
    pub min_vad: f64,
    pub male_below: f64,
    pub female_above: f64,
    pub face_min_height: f64,
    pub face_score_above: f64,
    pub ad_exclusion: SpanMode,
    pub weighting: Weighting,
    pub group_by: Vec<Vec<Dimension>>,
    pub tables: Vec<TableId>,
    pub format: OutputFormat,
    pub stop_list: Option<PathBuf>,
    pub min_population: usize,
    pub weight_by_hits: bool,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let calendar = CorpusCalendar::default();
        let thresholds = AlignThresholds::default();
        let faces = FaceRule::default();
        RunConfig {
            input_dir: None,
            names: None,
            programs: None,
            reports: None,
            breaks: None,
            segments: None,
            utterances: None,
            faces: None,
            timezone: calendar.timezone,
            tv_peak: calendar.tv_peak,
            radio_peak: calendar.radio_peak,
            conflict_cutoff: NaiveDate::from_ymd_opt(2023, 10, 7).unwrap().and_time(NaiveTime::MIN),
            min_vad: thresholds.min_vad_ratio,
            male_below: thresholds.male_below,
            female_above: thresholds.female_above,
            face_min_height: faces.min_height,
            face_score_above: faces.female_score_above,
            ad_exclusion: SpanMode::ExcludeBreaks,
            weighting: Weighting::Exact,
            group_by: vec![vec![Dimension::Medium, Dimension::Audience]],
            tables: TableId::ALL.to_vec(),
            format: OutputFormat::Delimited,
            stop_list: None,
            min_population: DEFAULT_MIN_POPULATION,
            weight_by_hits: false,
            out_dir: PathBuf::from("out"),
        }
    }
}

fn parse_unit(key: &str, value: &str) -> Result<f64, PipelineError> {
    let v: f64 = value.trim().parse().map_err(|e| config_err(key, value, e))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(config_err(key, value, "must lie within [0, 1]"))
    }
}

fn parse_bool(key: &str, value: &str) -> Result<bool, PipelineError> {
    match value.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(config_err(key, value, "expected true or false")),
    }
}

fn parse_cutoff(key: &str, value: &str) -> Result<NaiveDateTime, PipelineError> {
    let v = value.trim();
    NaiveDateTime::parse_from_str(v, "%Y-%m-%dT%H:%M")
        .or_else(|_| NaiveDateTime::parse_from_str(v, "%Y-%m-%dT%H:%M:%S"))
        .or_else(|_| NaiveDate::parse_from_str(v, "%Y-%m-%d").map(|d| d.and_time(NaiveTime::MIN)))
        .map_err(|e| config_err(key, value, e))
}

fn parse_group_by(key: &str, value: &str) -> Result<Vec<Vec<Dimension>>, PipelineError> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|spec| {
            if spec == "all" {
                return Ok(Vec::new());
            }
            spec.split('+')
                .map(|d| d.parse::<Dimension>().map_err(|e| config_err(key, value, e)))
                .collect()
        })
        .collect()
}

fn dimension_token(d: Dimension) -> &'static str {
    match d {
        Dimension::Medium => "medium",
        Dimension::Status => "status",
        Dimension::Category => "category",
        Dimension::Audience => "audience",
        Dimension::Conflict => "conflict",
        Dimension::Channel => "channel",
        Dimension::AdContext => "ad-context",
    }
}

/// `medium+audience`, or `all` for no dimension.
pub fn grouping_label(dims: &[Dimension]) -> String {
    if dims.is_empty() {
        "all".into()
    } else {
        dims.iter().map(|d| dimension_token(*d)).collect::<Vec<_>>().join("+")
    }
}

impl RunConfig {
    /// Keys accepted by [`RunConfig::set`], matching the CLI flag names.
    pub const KEYS: [&'static str; 26] = [
        "input-dir",
        "names",
        "programs",
        "reports",
        "breaks",
        "segments",
        "utterances",
        "faces",
        "timezone",
        "tv-peak",
        "radio-peak",
        "conflict-cutoff",
        "min-vad",
        "male-below",
        "female-above",
        "face-min-height",
        "face-score-above",
        "ad-exclusion",
        "weighting",
        "group-by",
        "tables",
        "format",
        "stop-list",
        "min-population",
        "weight-by-hits",
        "out-dir",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let path = || Some(PathBuf::from(value.trim()));
        match key {
            "input-dir" => self.input_dir = path(),
            "names" => self.names = path(),
            "programs" => self.programs = path(),
            "reports" => self.reports = path(),
            "breaks" => self.breaks = path(),
            "segments" => self.segments = path(),
            "utterances" => self.utterances = path(),
            "faces" => self.faces = path(),
            "timezone" => self.timezone = value.trim().parse().map_err(|e| config_err(key, value, e))?,
            "tv-peak" => self.tv_peak = value.parse().map_err(|e| config_err(key, value, e))?,
            "radio-peak" => self.radio_peak = value.parse().map_err(|e| config_err(key, value, e))?,
            "conflict-cutoff" => self.conflict_cutoff = parse_cutoff(key, value)?,
            "min-vad" => self.min_vad = parse_unit(key, value)?,
            "male-below" => self.male_below = parse_unit(key, value)?,
            "female-above" => self.female_above = parse_unit(key, value)?,
            "face-min-height" => self.face_min_height = parse_unit(key, value)?,
            "face-score-above" => self.face_score_above = parse_unit(key, value)?,
            "ad-exclusion" => self.ad_exclusion = value.parse().map_err(|e| config_err(key, value, e))?,
            "weighting" => {
                self.weighting = match value.trim() {
                    "exact" => Weighting::Exact,
                    "program-mean" | "program_mean" => Weighting::ProgramMean,
                    _ => return Err(config_err(key, value, "expected exact or program-mean")),
                }
            }
            "group-by" => self.group_by = parse_group_by(key, value)?,
            "tables" => {
                self.tables = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|t| t.parse().map_err(|e| config_err(key, value, e)))
                    .collect::<Result<_, _>>()?
            }
            "format" => self.format = value.parse().map_err(|e| config_err(key, value, e))?,
            "stop-list" => self.stop_list = path(),
            "min-population" => self.min_population = value.trim().parse().map_err(|e| config_err(key, value, e))?,
            "weight-by-hits" => self.weight_by_hits = parse_bool(key, value)?,
            "out-dir" => self.out_dir = PathBuf::from(value.trim()),
            _ => return Err(PipelineError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), PipelineError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        self.apply_text(&text)
    }

    /// Defaults, then the config file, then explicit overrides.
    pub fn resolve<'a>(
        file: Option<&Path>,
        overrides: impl IntoIterator<Item = (&'a str, String)>,
    ) -> Result<Self, PipelineError> {
        let mut cfg = RunConfig::default();
        if let Some(f) = file {
            cfg.apply_file(f)?;
        }
        for (k, v) in overrides {
            cfg.set(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        for (k, v) in [
            ("min-vad", self.min_vad),
            ("male-below", self.male_below),
            ("female-above", self.female_above),
            ("face-min-height", self.face_min_height),
            ("face-score-above", self.face_score_above),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(config_err(k, &v.to_string(), "must lie within [0, 1]"));
            }
        }
        if self.male_below > self.female_above {
            return Err(PipelineError::Config(format!(
                "male-below ({}) exceeds female-above ({})",
                self.male_below, self.female_above
            )));
        }
        Ok(())
    }

    /// Effective settings as strings, in key order.
    pub fn entries(&self) -> BTreeMap<String, String> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let weighting = match self.weighting {
            Weighting::Exact => "exact",
            Weighting::ProgramMean => "program-mean",
        };
        let group_by = self.group_by.iter().map(|g| grouping_label(g)).collect::<Vec<_>>().join(";");
        let tables = self.tables.iter().map(|t| t.token()).collect::<Vec<_>>().join(",");
        [
            ("input-dir", opt(&self.input_dir)),
            ("names", opt(&self.names)),
            ("programs", opt(&self.programs)),
            ("reports", opt(&self.reports)),
            ("breaks", opt(&self.breaks)),
            ("segments", opt(&self.segments)),
            ("utterances", opt(&self.utterances)),
            ("faces", opt(&self.faces)),
            ("timezone", self.timezone.name().to_string()),
            ("tv-peak", self.tv_peak.to_string()),
            ("radio-peak", self.radio_peak.to_string()),
            ("conflict-cutoff", self.conflict_cutoff.format("%Y-%m-%dT%H:%M").to_string()),
            ("min-vad", self.min_vad.to_string()),
            ("male-below", self.male_below.to_string()),
            ("female-above", self.female_above.to_string()),
            ("face-min-height", self.face_min_height.to_string()),
            ("face-score-above", self.face_score_above.to_string()),
            ("ad-exclusion", self.ad_exclusion.to_string()),
            ("weighting", weighting.to_string()),
            ("group-by", group_by),
            ("tables", tables),
            ("format", self.format.to_string()),
            ("stop-list", opt(&self.stop_list)),
            ("min-population", self.min_population.to_string()),
            ("weight-by-hits", self.weight_by_hits.to_string()),
            ("out-dir", self.out_dir.display().to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// Per-file paths: explicit ones win over the input directory layout.
    pub fn bundle_paths(&self) -> Result<BundlePaths, PipelineError> {
        let base = self.input_dir.as_ref().map(BundlePaths::in_dir);
        let pick = |explicit: &Option<PathBuf>, key: &str, from_dir: Option<&PathBuf>| {
            explicit
                .clone()
                .or_else(|| from_dir.cloned())
                .ok_or_else(|| PipelineError::Config(format!("no path for {key}: set input-dir or {key}")))
        };
        Ok(BundlePaths {
            names: pick(&self.names, "names", base.as_ref().map(|b| &b.names))?,
            programs: pick(&self.programs, "programs", base.as_ref().map(|b| &b.programs))?,
            reports: pick(&self.reports, "reports", base.as_ref().map(|b| &b.reports))?,
            breaks: pick(&self.breaks, "breaks", base.as_ref().map(|b| &b.breaks))?,
            segments: pick(&self.segments, "segments", base.as_ref().map(|b| &b.segments))?,
            utterances: pick(&self.utterances, "utterances", base.as_ref().map(|b| &b.utterances))?,
            faces: pick(&self.faces, "faces", base.as_ref().map(|b| &b.faces))?,
        })
    }

    pub fn calendar(&self) -> CorpusCalendar {
        CorpusCalendar {
            timezone: self.timezone,
            tv_peak: self.tv_peak,
            radio_peak: self.radio_peak,
            conflict_cutoff: resolve_local(self.timezone, self.conflict_cutoff),
        }
    }

    pub fn metrics_config(&self) -> MetricsConfig {
        MetricsConfig {
            calendar: self.calendar(),
            faces: FaceRule {
                min_height: self.face_min_height,
                female_score_above: self.face_score_above,
            },
            weighting: self.weighting,
        }
    }

    pub fn population_config(&self) -> PopulationConfig {
        PopulationConfig {
            thresholds: AlignThresholds {
                min_vad_ratio: self.min_vad,
                male_below: self.male_below,
                female_above: self.female_above,
            },
            calendar: self.calendar(),
            mode: self.ad_exclusion,
            weight_by_hits: self.weight_by_hits,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

/// SHA-256 of a file's bytes.
pub fn digest_file(path: &Path) -> Result<InputDigest, PipelineError> {
    let mut file = fs::File::open(path).map_err(io_err(path))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    let mut bytes = 0u64;
    loop {
        let n = file.read(&mut buf).map_err(io_err(path))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
        bytes += n as u64;
    }
    Ok(InputDigest {
        path: path.display().to_string(),
        bytes,
        sha256: hex::encode(hasher.finalize()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PopulationCounts {
    pub rows: usize,
    pub weight: f64,
}

/// Audit record written next to the outputs of every step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, InputDigest>,
    pub counts: Option<BundleCounts>,
    pub population: Option<PopulationCounts>,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub status: ExitStatus,
    pub exit_code: i32,
}

/// A parsed and validated corpus with the digests of its files.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub bundle: CorpusBundle,
    pub validation: ValidationReport,
    pub inputs: BTreeMap<String, InputDigest>,
}

/// Parses and validates every input. Fails before anything is written.
pub fn load_corpus(config: &RunConfig) -> Result<LoadedCorpus, PipelineError> {
    let paths = config.bundle_paths()?;
    let bundle = CorpusBundle::load(&paths)?;
    let validation = validate_bundle(&bundle)?;
    let mut inputs = BTreeMap::new();
    for (kind, path) in paths.all() {
        inputs.insert(kind.to_string(), digest_file(path)?);
    }
    if let Some(stop) = &config.stop_list {
        inputs.insert("stop-list".into(), digest_file(stop)?);
    }
    Ok(LoadedCorpus {
        bundle,
        validation,
        inputs,
    })
}

/// One name per line; blank lines and `#` comments are skipped.
pub fn read_stop_list(path: &Path) -> Result<Vec<String>, PipelineError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

pub fn extract_corpus_names(config: &RunConfig, bundle: &CorpusBundle) -> Result<CorpusNameStats, PipelineError> {
    let mut extractor = NameExtractor::new(&bundle.lexicon);
    if let Some(stop) = &config.stop_list {
        extractor = extractor.with_stop_list(read_stop_list(stop)?);
    }
    Ok(extractor.extract_corpus(&bundle.utterances))
}

/// Outcome of a step: status, written files and warnings.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub status: ExitStatus,
    pub outputs: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub manifest: RunManifest,
}

struct OutputSink<'a> {
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> OutputSink<'a> {
    fn new(config: &'a RunConfig) -> Result<Self, PipelineError> {
        fs::create_dir_all(&config.out_dir).map_err(io_err(&config.out_dir))?;
        Ok(OutputSink {
            config,
            written: Vec::new(),
        })
    }

    fn write(&mut self, file: &str, contents: &[u8]) -> Result<(), PipelineError> {
        let path = self.config.out_dir.join(file);
        fs::write(&path, contents).map_err(io_err(&path))?;
        self.written.push(path);
        Ok(())
    }

    fn table(&mut self, table: &Table) -> Result<(), PipelineError> {
        let text = self.config.format.render(table)?;
        let file = format!("{}.{}", table.name, self.config.format.extension());
        self.write(&file, text.as_bytes())
    }

    fn finish(
        mut self,
        command: &str,
        inputs: BTreeMap<String, InputDigest>,
        counts: Option<BundleCounts>,
        population: Option<PopulationCounts>,
        warnings: Vec<String>,
        status: ExitStatus,
    ) -> Result<RunSummary, PipelineError> {
        let manifest_path = self.config.out_dir.join(RUN_MANIFEST_FILE);
        let outputs: Vec<String> = self
            .written
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let manifest = RunManifest {
            command: command.into(),
            config: self.config.entries(),
            inputs,
            counts,
            population,
            warnings: warnings.clone(),
            outputs,
            status,
            exit_code: status.code(),
        };
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
        fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;
        self.written.push(manifest_path);
        Ok(RunSummary {
            status,
            outputs: self.written,
            warnings,
            manifest,
        })
    }
}

fn population_counts(rows: &[AnalysisRow]) -> PopulationCounts {
    PopulationCounts {
        rows: rows.len(),
        weight: rows.iter().map(|r| r.weight).sum(),
    }
}

/// Effect report, or a warning when the population is below the minimum.
fn effects_or_warning(
    rows: &[AnalysisRow],
    min_population: usize,
) -> Result<Result<EffectReport, String>, PipelineError> {
    if rows.len() < min_population {
        return Ok(Err(format!(
            "statistics skipped: population has {} rows, minimum is {}",
            rows.len(),
            min_population
        )));
    }
    Ok(Ok(effect_report(rows)?))
}

fn write_effects(sink: &mut OutputSink<'_>, report: &EffectReport) -> Result<(), PipelineError> {
    sink.table(&effects_table(report))?;
    let json = serde_json::to_string_pretty(report).map_err(ReportError::from)? + "\n";
    sink.write(EFFECT_REPORT_FILE, json.as_bytes())
}

fn population_csv(rows: &[AnalysisRow]) -> Result<Vec<u8>, PipelineError> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows)?;
    Ok(buf)
}

/// Full run: every configured table, the population rows, the effect
/// report and the run manifest.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    let loaded = load_corpus(config)?;
    let bundle = &loaded.bundle;
    let names = extract_corpus_names(config, bundle)?;
    let population = select_stats_population(bundle, &names, &config.population_config())?;
    let metrics_config = config.metrics_config();
    let inputs = ReportInputs {
        bundle,
        names: &names,
        population: &population,
        mode: config.ad_exclusion,
        config: &metrics_config,
    };
    let tables: Vec<Table> = config.tables.iter().map(|id| build_table(*id, &inputs)).collect();
    let effects = effects_or_warning(&population, config.min_population)?;

    let mut sink = OutputSink::new(config)?;
    for t in &tables {
        sink.table(t)?;
    }
    sink.write(POPULATION_FILE, &population_csv(&population)?)?;
    let mut warnings = loaded.validation.warnings.clone();
    let status = match &effects {
        Ok(report) => {
            write_effects(&mut sink, report)?;
            ExitStatus::Success
        }
        Err(w) => {
            warnings.push(w.clone());
            ExitStatus::EmptyPopulation
        }
    };
    sink.finish(
        "report",
        loaded.inputs,
        Some(loaded.validation.counts),
        Some(population_counts(&population)),
        warnings,
        status,
    )
}

/// Group metrics for every configured grouping.
pub fn run_compute(config: &RunConfig) -> Result<RunSummary, PipelineError> {
    let loaded = load_corpus(config)?;
    let names = extract_corpus_names(config, &loaded.bundle)?;
    let metrics_config = config.metrics_config();
    let tables: Vec<Table> = config
        .group_by
        .iter()
        .map(|dims| {
            let results = aggregate(&loaded.bundle, &names, &Grouping::by(dims), config.ad_exclusion, &metrics_config);
            groups_table(&format!("groups-{}", grouping_label(dims)), &results)
        })
        .collect();
    let mut sink = OutputSink::new(config)?;
    for t in &tables {
        sink.table(t)?;
    }
    sink.finish(
        "compute",
        loaded.inputs,
        Some(loaded.validation.counts),
        None,
        loaded.validation.warnings,
        ExitStatus::Success,
    )
}

/// Where the statistics step takes its rows from.
#[derive(Debug, Clone, PartialEq)]
pub enum RowSource {
    Corpus,
    File(PathBuf),
}

/// ANOVA per factor and the joint fit, from the corpus or an exported rows file.
pub fn run_stats(config: &RunConfig, source: &RowSource) -> Result<RunSummary, PipelineError> {
    let (rows, inputs, counts, mut warnings) = match source {
        RowSource::Corpus => {
            let loaded = load_corpus(config)?;
            let names = extract_corpus_names(config, &loaded.bundle)?;
            let rows = select_stats_population(&loaded.bundle, &names, &config.population_config())?;
            (rows, loaded.inputs, Some(loaded.validation.counts), loaded.validation.warnings)
        }
        RowSource::File(path) => {
            let file = fs::File::open(path).map_err(io_err(path))?;
            let rows = read_rows(std::io::BufReader::new(file))?;
            let mut inputs = BTreeMap::new();
            inputs.insert("rows".to_string(), digest_file(path)?);
            (rows, inputs, None, Vec::new())
        }
    };
    let effects = effects_or_warning(&rows, config.min_population)?;
    let mut sink = OutputSink::new(config)?;
    if *source == RowSource::Corpus {
        sink.write(POPULATION_FILE, &population_csv(&rows)?)?;
    }
    let status = match &effects {
        Ok(report) => {
            write_effects(&mut sink, report)?;
            ExitStatus::Success
        }
        Err(w) => {
            warnings.push(w.clone());
            ExitStatus::EmptyPopulation
        }
    };
    sink.finish("stats", inputs, counts, Some(population_counts(&rows)), warnings, status)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.min_population, 100);
        assert_eq!(cfg.calendar(), CorpusCalendar::default());
        assert_eq!(cfg.entries().len(), RunConfig::KEYS.len());
        assert!(RunConfig::KEYS.iter().all(|k| cfg.entries().contains_key(*k)));
    }

    #[test]
    fn entries_round_trip_through_set() {
        let mut cfg = RunConfig::default();
        cfg.apply_text(
            "# comment\n\ninput-dir = corpus\ntv-peak = 19:00-22:30\nmin-vad=0.6\ngroup-by = medium+status;all;ad-context\n\
             tables = table2, table6\nformat = aligned-text\nweighting = program-mean\nconflict-cutoff = 2023-10-08\n",
        )
        .unwrap();
        let mut again = RunConfig::default();
        for (k, v) in cfg.entries() {
            if !v.is_empty() {
                again.set(&k, &v).unwrap();
            }
        }
        assert_eq!(again, cfg);
        assert_eq!(cfg.group_by.len(), 3);
        assert!(cfg.group_by[1].is_empty());
        assert_eq!(cfg.tables, vec![TableId::Table2, TableId::Table6]);
    }

    #[test]
    fn overrides_beat_file() {
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("run.conf");
        fs::write(&file, "min-vad = 0.7\nmale-below = 0.1\n").unwrap();
        let cfg = RunConfig::resolve(Some(&file), [("min-vad", "0.4".to_string())]).unwrap();
        assert_eq!(cfg.min_vad, 0.4);
        assert_eq!(cfg.male_below, 0.1);
    }

    #[test]
    fn rejects_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.set("min-vad", "1.5").is_err());
        assert!(cfg.set("tv-peak", "23:00-18:00").is_err());
        assert!(cfg.set("nonsense", "1").is_err());
        assert!(cfg.apply_text("no equals sign").is_err());
        cfg.set("male-below", "0.9").unwrap();
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
    }

    #[test]
    fn explicit_paths_override_directory() {
        let mut cfg = RunConfig::default();
        assert!(cfg.bundle_paths().is_err());
        cfg.set("input-dir", "d").unwrap();
        cfg.set("faces", "elsewhere/f.jsonl").unwrap();
        let p = cfg.bundle_paths().unwrap();
        assert_eq!(p.faces, PathBuf::from("elsewhere/f.jsonl"));
        assert_eq!(p.segments, PathBuf::from("d/segments.jsonl"));
    }

    #[test]
    fn digest_tracks_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let f = dir.path().join("x");
        fs::write(&f, b"abc").unwrap();
        let d = digest_file(&f).unwrap();
        assert_eq!(d.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(d.bytes, 3);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let all = [
            ExitStatus::Success,
            ExitStatus::Failure,
            ExitStatus::Usage,
            ExitStatus::ParseFailure,
            ExitStatus::ValidationFailure,
            ExitStatus::EmptyPopulation,
        ];
        let codes: std::collections::BTreeSet<i32> = all.iter().map(|s| s.code()).collect();
        assert_eq!(codes.len(), all.len());
    }
}
