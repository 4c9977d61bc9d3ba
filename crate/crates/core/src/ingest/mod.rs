//! Strict parsers for every external input, and the validated
//! [`CorpusBundle`] they assemble into.
//!
//! All parsers fail fast with a line number. Semantic oddities that do not
//! corrupt estimates (a program with no utterances, say) are collected as
//! warnings by [`validate_bundle`] instead.

mod names;
mod streams;
mod tables;

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use names::{canonical_name, parse_name_db, NameLexicon, RARE_NAME_SENTINEL, UNKNOWN_YEAR};
pub use streams::{parse_faces, parse_segments, parse_utterances, write_faces, write_segments, write_utterances};
pub use tables::{
    format_utc, parse_breaks, parse_programs, parse_reports, write_breaks, write_programs, write_reports,
    BREAK_COLUMNS, MEDIA_SPAN_TOLERANCE_MS, PROGRAM_COLUMNS, REPORT_COLUMNS,
};

use crate::model::{ChannelReport, FaceObservation, Medium, Program, Role, SpeechSegment, TimeInterval, Utterance};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: malformed record: {reason}")]
    MalformedRecord { line: u64, reason: String },
    #[error("unexpected header {found:?}, expected {expected:?}")]
    BadHeader { found: Vec<String>, expected: Vec<String> },
    #[error("line {line}: invalid {field} value {value:?}")]
    InvalidEnum { line: u64, field: &'static str, value: String },
    #[error("line {line}: end time is not after start time")]
    NonMonotoneTimes { line: u64 },
    #[error("line {line}: media span lasts {media_ms} ms but wall-clock duration is {wall_ms} ms")]
    MediaSpanMismatch { line: u64, media_ms: u64, wall_ms: i64 },
    #[error("line {line}: duplicate program id {program_id:?}")]
    DuplicateProgramId { line: u64, program_id: String },
    #[error("line {line}: second report for program {program_id:?} role {role}")]
    DuplicateReport { line: u64, program_id: String, role: Role },
    #[error("line {line}: schema violation: {reason}")]
    SchemaViolation { line: u64, reason: String },
    #[error("line {line}: overlapping speech segments in media {media_id:?}")]
    OverlappingSegments { media_id: String, line: u64 },
    #[error("{kind} references unknown {target} {key:?}")]
    DanglingReference {
        kind: &'static str,
        target: &'static str,
        key: String,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
}

impl From<csv::Error> for IngestError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => IngestError::Io(io),
            other => IngestError::MalformedRecord {
                line,
                reason: format!("{other:?}"),
            },
        }
    }
}

impl IngestError {
    /// Unwraps the file context, if any.
    pub fn root(&self) -> &IngestError {
        match self {
            IngestError::File { source, .. } => source.root(),
            other => other,
        }
    }

    /// True for cross-reference failures, as opposed to parse failures.
    pub fn is_validation(&self) -> bool {
        matches!(self.root(), IngestError::DanglingReference { .. })
    }
}

pub(crate) fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub(crate) fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<(), IngestError> {
    let found: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if found.iter().map(String::as_str).eq(expected.iter().copied()) {
        Ok(())
    } else {
        Err(IngestError::BadHeader {
            found,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        })
    }
}

/// Every input of one corpus, parsed and sorted.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusBundle {
    pub programs: BTreeMap<String, Program>,
    pub reports: Vec<ChannelReport>,
    pub breaks: BTreeMap<String, Vec<TimeInterval>>,
    pub segments: BTreeMap<String, Vec<SpeechSegment>>,
    pub utterances: BTreeMap<String, Vec<Utterance>>,
    pub faces: BTreeMap<String, Vec<FaceObservation>>,
    pub lexicon: NameLexicon,
}

/// File locations of a bundle. [`BundlePaths::in_dir`] gives the canonical layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundlePaths {
    pub names: PathBuf,
    pub programs: PathBuf,
    pub reports: PathBuf,
    pub breaks: PathBuf,
    pub segments: PathBuf,
    pub utterances: PathBuf,
    pub faces: PathBuf,
}

impl BundlePaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let d = dir.as_ref();
        BundlePaths {
            names: d.join("names.csv"),
            programs: d.join("programs.csv"),
            reports: d.join("reports.csv"),
            breaks: d.join("breaks.csv"),
            segments: d.join("segments.jsonl"),
            utterances: d.join("utterances.jsonl"),
            faces: d.join("faces.jsonl"),
        }
    }

    pub fn all(&self) -> [(&'static str, &Path); 7] {
        [
            ("names", &self.names),
            ("programs", &self.programs),
            ("reports", &self.reports),
            ("breaks", &self.breaks),
            ("segments", &self.segments),
            ("utterances", &self.utterances),
            ("faces", &self.faces),
        ]
    }
}

fn with_file<T>(path: &Path, parse: impl FnOnce(BufReader<File>) -> Result<T, IngestError>) -> Result<T, IngestError> {
    let wrap = |e: IngestError| IngestError::File {
        path: path.to_path_buf(),
        source: Box::new(e),
    };
    let file = File::open(path).map_err(|e| wrap(e.into()))?;
    parse(BufReader::new(file)).map_err(wrap)
}

fn to_file(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<(), IngestError>) -> Result<(), IngestError> {
    let wrap = |e: IngestError| IngestError::File {
        path: path.to_path_buf(),
        source: Box::new(e),
    };
    let mut out = BufWriter::new(File::create(path).map_err(|e| wrap(e.into()))?);
    write(&mut out).map_err(wrap)?;
    out.flush().map_err(|e| wrap(e.into()))
}

impl CorpusBundle {
    /// Parses every file. Nothing is returned unless all parses succeed.
    pub fn load(paths: &BundlePaths) -> Result<Self, IngestError> {
        Ok(CorpusBundle {
            lexicon: with_file(&paths.names, parse_name_db)?,
            programs: with_file(&paths.programs, parse_programs)?,
            reports: with_file(&paths.reports, parse_reports)?,
            breaks: with_file(&paths.breaks, parse_breaks)?,
            segments: with_file(&paths.segments, parse_segments)?,
            utterances: with_file(&paths.utterances, parse_utterances)?,
            faces: with_file(&paths.faces, parse_faces)?,
        })
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, IngestError> {
        Self::load(&BundlePaths::in_dir(dir))
    }

    pub fn write(&self, paths: &BundlePaths) -> Result<(), IngestError> {
        to_file(&paths.names, |w| self.lexicon.write_name_db(w))?;
        to_file(&paths.programs, |w| write_programs(w, self.programs.values()))?;
        to_file(&paths.reports, |w| write_reports(w, &self.reports))?;
        to_file(&paths.breaks, |w| write_breaks(w, &self.breaks))?;
        to_file(&paths.segments, |w| write_segments(w, &self.segments))?;
        to_file(&paths.utterances, |w| write_utterances(w, &self.utterances))?;
        to_file(&paths.faces, |w| write_faces(w, &self.faces))
    }

    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<(), IngestError> {
        std::fs::create_dir_all(dir.as_ref())?;
        self.write(&BundlePaths::in_dir(dir))
    }

    /// Programs whose media carry commercial-break timecodes, by channel.
    pub fn channels_with_breaks(&self) -> BTreeSet<&str> {
        self.programs
            .values()
            .filter(|p| self.breaks.get(&p.media_id).is_some_and(|b| !b.is_empty()))
            .map(|p| p.channel_id.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BundleCounts {
    pub programs: usize,
    pub reports: usize,
    pub breaks: usize,
    pub segments: usize,
    pub utterances: usize,
    pub faces: usize,
    pub names: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub counts: BundleCounts,
    pub warnings: Vec<String>,
}

/// Cross-reference checks. Dangling references are fatal; missing
/// descriptors only produce warnings.
pub fn validate_bundle(bundle: &CorpusBundle) -> Result<ValidationReport, IngestError> {
    let media: BTreeSet<&str> = bundle.programs.values().map(|p| p.media_id.as_str()).collect();
    for r in &bundle.reports {
        if !bundle.programs.contains_key(&r.program_id) {
            return Err(IngestError::DanglingReference {
                kind: "channel report",
                target: "program",
                key: r.program_id.clone(),
            });
        }
    }
    let streams: [(&'static str, Vec<&String>); 4] = [
        ("commercial break", bundle.breaks.keys().collect()),
        ("speech segment", bundle.segments.keys().collect()),
        ("utterance", bundle.utterances.keys().collect()),
        ("face observation", bundle.faces.keys().collect()),
    ];
    for (kind, keys) in streams {
        if let Some(missing) = keys.into_iter().find(|k| !media.contains(k.as_str())) {
            return Err(IngestError::DanglingReference {
                kind,
                target: "media",
                key: missing.clone(),
            });
        }
    }

    let reported: BTreeSet<&str> = bundle.reports.iter().map(|r| r.program_id.as_str()).collect();
    let mut warnings = Vec::new();
    for p in bundle.programs.values() {
        let has_segments = bundle
            .segments
            .get(&p.media_id)
            .is_some_and(|v| v.iter().any(|s| p.media_span.overlap_ms(s.span) > 0));
        let has_utterances = bundle
            .utterances
            .get(&p.media_id)
            .is_some_and(|v| v.iter().any(|u| p.media_span.contains_ms(u.span.midpoint_ms())));
        let has_faces = bundle
            .faces
            .get(&p.media_id)
            .is_some_and(|v| v.iter().any(|f| p.media_span.contains_ms(f.frame_ms)));
        if !has_segments {
            warnings.push(format!("program {} has no speech segments", p.program_id));
        }
        if !has_utterances {
            warnings.push(format!("program {} has no utterances", p.program_id));
        }
        if p.medium == Medium::Tv && !has_faces {
            warnings.push(format!("program {} has no face observations", p.program_id));
        }
        if !reported.contains(p.program_id.as_str()) {
            warnings.push(format!("program {} has no channel report", p.program_id));
        }
    }

    Ok(ValidationReport {
        counts: BundleCounts {
            programs: bundle.programs.len(),
            reports: bundle.reports.len(),
            breaks: bundle.breaks.values().map(Vec::len).sum(),
            segments: bundle.segments.values().map(Vec::len).sum(),
            utterances: bundle.utterances.values().map(Vec::len).sum(),
            faces: bundle.faces.values().map(Vec::len).sum(),
            names: bundle.lexicon.len(),
        },
        warnings,
    })
}
