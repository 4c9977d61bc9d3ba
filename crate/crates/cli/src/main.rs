//! `wre`: command-line front end of the representation engine.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use wre_core::pipeline::{
    load_corpus, run_compute, run_pipeline, run_stats, ExitStatus, PipelineError, RowSource, RunConfig, RunSummary,
};
use wre_core::stats::write_rows;
use wre_core::synthgen::{
    generate_population, generate_to_dir, read_spec, PopulationSpec, SynthSpec, MANIFEST_FILE,
};

#[derive(Parser)]
#[command(name = "wre", version, about = "Women representation estimates for broadcast corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and cross-check the input files, then print counts and warnings.
    IngestCheck(ConfigArgs),
    /// Write group metrics for every --group-by spec.
    Compute(ConfigArgs),
    /// Run one-way ANOVA per factor and the joint fit.
    Stats {
        #[command(flatten)]
        config: ConfigArgs,
        /// Analysis rows exported earlier, instead of the corpus.
        #[arg(long)]
        rows: Option<PathBuf>,
    },
    /// Full pipeline: report tables, population rows, effects and manifest.
    Report(ConfigArgs),
    /// Generate a synthetic corpus and its ground-truth manifest.
    Synth(SynthArgs),
}

macro_rules! config_args {
    ($( $(#[$doc:meta])* $field:ident => $key:literal ),* $(,)?) => {
        #[derive(Args, Debug, Default)]
        struct ConfigArgs {
            /// Key-value configuration file; flags override it.
            #[arg(long)]
            config: Option<PathBuf>,
            $(
                $(#[$doc])*
                #[arg(long = $key)]
                $field: Option<String>,
            )*
        }

        impl ConfigArgs {
            fn overrides(&self) -> Vec<(&'static str, String)> {
                let mut out = Vec::new();
                $( if let Some(v) = &self.$field { out.push(($key, v.clone())); } )*
                out
            }
        }
    };
}

config_args! {
    /// Directory holding the canonical input files.
    input_dir => "input-dir",
    /// Name database (semicolon-separated).
    names => "names",
    programs => "programs",
    reports => "reports",
    breaks => "breaks",
    segments => "segments",
    utterances => "utterances",
    faces => "faces",
    /// IANA timezone of wall-clock times [default: Europe/Paris].
    timezone => "timezone",
    /// TV peak window, HH:MM-HH:MM [default: 18:00-23:00].
    tv_peak => "tv-peak",
    /// Radio peak window, HH:MM-HH:MM [default: 06:00-09:00].
    radio_peak => "radio-peak",
    /// Local date or date-time starting the "after" period [default: 2023-10-07].
    conflict_cutoff => "conflict-cutoff",
    /// Minimum voice-activity ratio of a population utterance [default: 0.5].
    min_vad => "min-vad",
    /// Female-speech ratio below which the speaker is male [default: 0.2].
    male_below => "male-below",
    /// Female-speech ratio above which the speaker is female [default: 0.8].
    female_above => "female-above",
    /// Minimum face height as a fraction of the frame [default: 0.1].
    face_min_height => "face-min-height",
    /// Score above which a face is female [default: 0.5].
    face_score_above => "face-score-above",
    /// exclude-breaks, only-breaks or raw [default: exclude-breaks].
    ad_exclusion => "ad-exclusion",
    /// exact or program-mean [default: exact].
    weighting => "weighting",
    /// Groupings separated by ';', dimensions joined by '+' [default: medium+audience].
    group_by => "group-by",
    /// Comma-separated table templates [default: all six].
    tables => "tables",
    /// delimited, structured or aligned-text [default: delimited].
    format => "format",
    /// File of first names never counted, one per line.
    stop_list => "stop-list",
    /// Minimum population rows for statistics [default: 100].
    min_population => "min-population",
    /// Weight population rows by their number of names [default: false].
    weight_by_hits => "weight-by-hits",
    /// Output directory [default: out].
    out_dir => "out-dir",
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, PipelineError> {
        RunConfig::resolve(self.config.as_deref(), self.overrides())
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the bundle and truth.json.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Programs in each cell of the default layout.
    #[arg(long, default_value_t = 10)]
    programs_per_cell: usize,
    /// JSON generator spec replacing the default layout.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Also write a planted analysis-row file with this many rows.
    #[arg(long)]
    population: Option<usize>,
}

/// Prints a line, ignoring a closed stdout.
macro_rules! say {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($arg)*);
    }};
}

fn report_summary(summary: &RunSummary) -> ExitCode {
    for path in &summary.outputs {
        say!("{}", path.display());
    }
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    exit(summary.status)
}

fn exit(status: ExitStatus) -> ExitCode {
    ExitCode::from(status.code() as u8)
}

fn fail(e: &dyn std::fmt::Display, status: ExitStatus) -> ExitCode {
    eprintln!("error: {e}");
    exit(status)
}

fn ingest_check(args: &ConfigArgs) -> Result<ExitCode, PipelineError> {
    let cfg = args.resolve()?;
    let loaded = load_corpus(&cfg)?;
    let out = serde_json::json!({
        "counts": loaded.validation.counts,
        "warnings": loaded.validation.warnings,
        "inputs": loaded.inputs,
    });
    say!("{}", serde_json::to_string_pretty(&out).expect("json"));
    Ok(exit(ExitStatus::Success))
}

fn synth(args: &SynthArgs) -> ExitCode {
    let spec = match &args.spec {
        Some(path) => match read_spec(path) {
            Ok(s) => s,
            Err(e) => return fail(&e, ExitStatus::ParseFailure),
        },
        None => SynthSpec::default_corpus(args.seed, args.programs_per_cell),
    };
    let manifest = match generate_to_dir(&spec, &args.out) {
        Ok(m) => m,
        Err(e) => return fail(&e, ExitStatus::Failure),
    };
    say!(
        "{} programs in {} cells written to {} ({})",
        manifest.programs,
        manifest.cells.len(),
        args.out.display(),
        MANIFEST_FILE
    );
    if let Some(n) = args.population {
        let rows = match generate_population(&PopulationSpec::planted(spec.seed, n, 0.369, 0.282)) {
            Ok(r) => r,
            Err(e) => return fail(&e, ExitStatus::Failure),
        };
        let path = args.out.join("population.csv");
        let written = std::fs::File::create(&path)
            .map_err(|e| e.to_string())
            .and_then(|f| write_rows(std::io::BufWriter::new(f), &rows).map_err(|e| e.to_string()));
        if let Err(e) = written {
            return fail(&format!("{}: {e}", path.display()), ExitStatus::Failure);
        }
        say!("{n} analysis rows written to {}", path.display());
    }
    exit(ExitStatus::Success)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::IngestCheck(args) => ingest_check(args),
        Command::Compute(args) => args.resolve().and_then(|c| run_compute(&c)).map(|s| report_summary(&s)),
        Command::Stats { config, rows } => {
            let source = rows.clone().map_or(RowSource::Corpus, RowSource::File);
            config.resolve().and_then(|c| run_stats(&c, &source)).map(|s| report_summary(&s))
        }
        Command::Report(args) => args.resolve().and_then(|c| run_pipeline(&c)).map(|s| report_summary(&s)),
        Command::Synth(args) => return synth(args),
    };
    result.unwrap_or_else(|e| fail(&e, e.status()))
}
