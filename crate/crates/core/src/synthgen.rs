//! Seeded synthetic corpora with exact ground truth.
//!
//! Every cell of a [`SynthSpec`] is a set of programs sharing medium,
//! channel status, category, audience slot and conflict period. Female
//! speech time, female faces, female name hits and reported women are
//! allocated per cell so the realized rate is the closest one to the
//! target the cell's totals allow. The [`SynthManifest`] records the
//! realized numerators and weights, which the engine must reproduce.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate, NaiveTime};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::ingest::{parse_name_db, CorpusBundle, IngestError, NameLexicon};
use crate::metrics::Metrics;
use crate::model::{
    resolve_local, AudienceSlot, ChannelReport, ChannelStatus, ConflictPeriod, CorpusCalendar, FaceObservation,
    Medium, MetricKind, MetricValue, Program, ProgramCategory, Role, SegmentLabel, SpeechSegment, TimeInterval,
    Utterance,
};
use crate::stats::{AnalysisRow, Factor};

/// Bundled test lexicon in name-database format.
pub const FIXTURE_LEXICON: &str = include_str!("../data/names_fixture.csv");

pub fn fixture_lexicon() -> NameLexicon {
    parse_name_db(FIXTURE_LEXICON.as_bytes()).expect("bundled lexicon parses")
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Target percentages of women.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub wpr: f64,
    pub wsr: f64,
    pub wqr: f64,
    pub wfr: f64,
}

impl Rates {
    pub const fn new(wpr: f64, wsr: f64, wqr: f64, wfr: f64) -> Self {
        Rates { wpr, wsr, wqr, wfr }
    }
}

/// Commercial breaks inside every program of a cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakSpec {
    /// Fraction of program time spent in breaks, in [0, 0.5].
    pub share: f64,
    /// Targets inside breaks. `wpr` is unused.
    pub rates: Rates,
}

/// Percentage of female first names quoted by each speaker gender.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeakerRates {
    pub female_speaker: f64,
    pub male_speaker: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSpec {
    pub medium: Medium,
    pub status: ChannelStatus,
    pub category: ProgramCategory,
    pub audience: AudienceSlot,
    #[serde(default = "default_conflict")]
    pub conflict: ConflictPeriod,
    pub programs: usize,
    pub rates: Rates,
    #[serde(default)]
    pub breaks: Option<BreakSpec>,
    /// When set, every in-program utterance quotes exactly one
    /// unambiguous name and `rates.wqr` is ignored for program content.
    #[serde(default)]
    pub speaker_rates: Option<SpeakerRates>,
}

fn default_conflict() -> ConflictPeriod {
    ConflictPeriod::Before
}

impl CellSpec {
    pub fn new(
        medium: Medium,
        status: ChannelStatus,
        category: ProgramCategory,
        audience: AudienceSlot,
        programs: usize,
        rates: Rates,
    ) -> Self {
        CellSpec {
            medium,
            status,
            category,
            audience,
            conflict: ConflictPeriod::Before,
            programs,
            rates,
            breaks: None,
            speaker_rates: None,
        }
    }

    pub fn key(&self) -> CellKey {
        CellKey {
            medium: self.medium,
            status: self.status,
            category: self.category,
            audience: self.audience,
            conflict: self.conflict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CellKey {
    pub medium: Medium,
    pub status: ChannelStatus,
    pub category: ProgramCategory,
    pub audience: AudienceSlot,
    pub conflict: ConflictPeriod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub cells: Vec<CellSpec>,
    #[serde(default = "default_channels")]
    pub channels_per_group: usize,
    /// Inclusive range of program durations, in minutes.
    #[serde(default = "default_minutes")]
    pub program_minutes: (u32, u32),
    /// Inclusive range of reported persons per program.
    #[serde(default = "default_persons")]
    pub persons_per_program: (u32, u32),
    /// Inclusive range of names quoted per utterance.
    #[serde(default = "default_hits")]
    pub hits_per_utterance: (u32, u32),
    /// Probability that a quoted name is gender-ambiguous.
    #[serde(default = "default_neutral")]
    pub neutral_name_share: f64,
    /// Name database to draw from instead of the bundled fixture.
    #[serde(default)]
    pub lexicon: Option<PathBuf>,
}

fn default_channels() -> usize {
    3
}
fn default_minutes() -> (u32, u32) {
    (5, 20)
}
fn default_persons() -> (u32, u32) {
    (10, 30)
}
fn default_hits() -> (u32, u32) {
    (0, 2)
}
fn default_neutral() -> f64 {
    0.1
}

impl SynthSpec {
    pub fn new(seed: u64, cells: Vec<CellSpec>) -> Self {
        SynthSpec {
            seed,
            cells,
            channels_per_group: default_channels(),
            program_minutes: default_minutes(),
            persons_per_program: default_persons(),
            hits_per_utterance: default_hits(),
            neutral_name_share: default_neutral(),
            lexicon: None,
        }
    }

    /// Every (medium, status, category, slot) cell before the conflict,
    /// plus news after it, with commercial breaks on private TV.
    pub fn default_corpus(seed: u64, programs_per_cell: usize) -> Self {
        let mut cells = Vec::new();
        for (mi, &medium) in Medium::ALL.iter().enumerate() {
            for (si, &status) in ChannelStatus::ALL.iter().enumerate() {
                for (ci, &category) in ProgramCategory::ALL.iter().enumerate() {
                    for (ai, &audience) in AudienceSlot::ALL.iter().enumerate() {
                        let shift = (mi + 2 * si + 3 * ci + 5 * ai) as f64 % 7.0;
                        let rates = Rates::new(36.0 + shift, 30.0 + shift, 28.0 + shift, 33.0 + shift);
                        let mut cell = CellSpec::new(medium, status, category, audience, programs_per_cell, rates);
                        if medium == Medium::Tv && status == ChannelStatus::Private {
                            cell.breaks = Some(BreakSpec {
                                share: 0.12,
                                rates: Rates::new(0.0, 43.0, 36.0, 48.0),
                            });
                        }
                        if category == ProgramCategory::News {
                            let mut after = cell.clone();
                            after.conflict = ConflictPeriod::After;
                            after.rates.wsr -= 2.0;
                            cells.push(after);
                        }
                        cells.push(cell);
                    }
                }
            }
        }
        SynthSpec::new(seed, cells)
    }

    pub fn total_programs(&self) -> usize {
        self.cells.iter().map(|c| c.programs).sum()
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: String| Err(SynthError::InvalidSpec(m));
        let in_pct = |v: f64| (0.0..=100.0).contains(&v);
        let mut keys = BTreeSet::new();
        for (i, c) in self.cells.iter().enumerate() {
            if !keys.insert(c.key()) {
                return bad(format!("cell {i} repeats an earlier cell"));
            }
            let r = c.rates;
            if ![r.wpr, r.wsr, r.wqr, r.wfr].into_iter().all(in_pct) {
                return bad(format!("cell {i}: rates must lie in [0, 100]"));
            }
            if let Some(b) = c.breaks {
                if !(0.0..=0.5).contains(&b.share) {
                    return bad(format!("cell {i}: break share must lie in [0, 0.5]"));
                }
                if ![b.rates.wsr, b.rates.wqr, b.rates.wfr].into_iter().all(in_pct) {
                    return bad(format!("cell {i}: break rates must lie in [0, 100]"));
                }
            }
            if let Some(s) = c.speaker_rates {
                if !in_pct(s.female_speaker) || !in_pct(s.male_speaker) {
                    return bad(format!("cell {i}: speaker rates must lie in [0, 100]"));
                }
            }
        }
        let (lo, hi) = self.program_minutes;
        if lo < 2 || hi > 120 || lo > hi {
            return bad("program_minutes must satisfy 2 <= min <= max <= 120".into());
        }
        let (lo, hi) = self.persons_per_program;
        if lo < 1 || lo > hi {
            return bad("persons_per_program must satisfy 1 <= min <= max".into());
        }
        let (lo, hi) = self.hits_per_utterance;
        if lo > hi || hi > 4 {
            return bad("hits_per_utterance must satisfy min <= max <= 4".into());
        }
        if !(0.0..=1.0).contains(&self.neutral_name_share) {
            return bad("neutral_name_share must lie in [0, 1]".into());
        }
        if self.channels_per_group == 0 {
            return bad("channels_per_group must be positive".into());
        }
        Ok(())
    }
}

/// Mean quoted-name probability over population utterances of one speaker gender.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupSum {
    pub rows: u64,
    pub sum_y: f64,
}

impl GroupSum {
    pub fn mean(&self) -> Option<f64> {
        (self.rows > 0).then(|| self.sum_y / self.rows as f64)
    }

    fn add(&mut self, y: f64) {
        self.rows += 1;
        self.sum_y += y;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellTruth {
    #[serde(flatten)]
    pub key: CellKey,
    pub program_ids: Vec<String>,
    /// Program content with breaks removed.
    pub in_program: Metrics,
    /// Break content; absent for cells without breaks.
    pub in_break: Option<Metrics>,
    pub female_speakers: GroupSum,
    pub male_speakers: GroupSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub seed: u64,
    pub programs: usize,
    pub cells: Vec<CellTruth>,
}

impl SynthManifest {
    pub fn cell(&self, key: &CellKey) -> Option<&CellTruth> {
        self.cells.iter().find(|c| &c.key == key)
    }
}

pub const MANIFEST_FILE: &str = "truth.json";

/// Largest-remainder split of `k` proportionally to `caps`. Each share is
/// at most its cap when `k <= sum(caps)`.
pub fn apportion(k: u64, caps: &[u64]) -> Vec<u64> {
    let total: u128 = caps.iter().map(|&c| c as u128).sum();
    if total == 0 {
        return vec![0; caps.len()];
    }
    let mut shares: Vec<u64> = Vec::with_capacity(caps.len());
    let mut rems: Vec<(u128, usize)> = Vec::with_capacity(caps.len());
    for (i, &c) in caps.iter().enumerate() {
        let num = k as u128 * c as u128;
        shares.push((num / total) as u64);
        rems.push((num % total, i));
    }
    let mut left = k - shares.iter().sum::<u64>();
    rems.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, i) in rems {
        if left == 0 {
            break;
        }
        shares[i] += 1;
        left -= 1;
    }
    shares
}

fn target_count(pct: f64, total: u64) -> u64 {
    ((pct / 100.0 * total as f64).round() as u64).min(total)
}

/// Splits `total` into `n` parts of at least `min` each, uniformly at random.
fn random_parts(rng: &mut ChaCha8Rng, total: u64, n: usize, min: u64) -> Vec<u64> {
    let spare = total - min * n as u64;
    let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(0..=spare)).collect();
    cuts.sort_unstable();
    let mut parts = Vec::with_capacity(n);
    let mut prev = 0;
    for c in cuts.into_iter().chain(std::iter::once(spare)) {
        parts.push(min + c - prev);
        prev = c;
    }
    parts
}

const PIECE_MIN_MS: u64 = 2_000;
const PIECE_MAX_MS: u64 = 12_000;
const UTTERANCE_MIN_PIECE_MS: u64 = 1_500;
const FRAME_MS: u64 = 1_000;

/// Random piece lengths summing to `total`.
fn split_total(rng: &mut ChaCha8Rng, total: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut rem = total;
    while rem > PIECE_MAX_MS {
        let take = rng.gen_range(PIECE_MIN_MS..=PIECE_MAX_MS.min(rem - PIECE_MIN_MS));
        out.push(take);
        rem -= take;
    }
    if rem > 0 {
        out.push(rem);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Content,
    Break,
    Outside,
}

struct Region {
    media: usize,
    span: TimeInterval,
    class: Class,
    gendered_ms: u64,
}

struct Slot {
    media: usize,
    span: TimeInterval,
    female_speaker: bool,
    class: Class,
    hits: Vec<Hit>,
}

#[derive(Clone, Copy)]
enum Hit {
    Female,
    Male,
    Neutral,
}

struct FaceSlot {
    media: usize,
    frame_ms: u64,
    height: f64,
    class: Class,
}

struct NamePools {
    female: Vec<(String, f64)>,
    male: Vec<(String, f64)>,
    neutral: Vec<(String, f64)>,
    neutral_mean: f64,
}

impl NamePools {
    fn new(lexicon: &NameLexicon) -> Result<Self, SynthError> {
        let mut pools = NamePools {
            female: Vec::new(),
            male: Vec::new(),
            neutral: Vec::new(),
            neutral_mean: 0.0,
        };
        for r in lexicon.iter() {
            let entry = (r.name.clone(), r.female_prob);
            if r.female_prob == 1.0 {
                pools.female.push(entry);
            } else if r.female_prob == 0.0 {
                pools.male.push(entry);
            } else {
                pools.neutral.push(entry);
            }
        }
        if !pools.neutral.is_empty() {
            pools.neutral_mean = pools.neutral.iter().map(|n| n.1).sum::<f64>() / pools.neutral.len() as f64;
        }
        if pools.female.is_empty() || pools.male.is_empty() {
            return Err(SynthError::InvalidSpec(
                "lexicon needs at least one exclusively female and one exclusively male name".into(),
            ));
        }
        Ok(pools)
    }

    fn pick(&self, rng: &mut ChaCha8Rng, hit: Hit) -> (String, f64) {
        let pool = match hit {
            Hit::Female => &self.female,
            Hit::Male => &self.male,
            Hit::Neutral if self.neutral.is_empty() => &self.female,
            Hit::Neutral => &self.neutral,
        };
        pool.choose(rng).expect("non-empty pool").clone()
    }
}

const FILLERS: &[&str] = &[
    "alors", "nous", "avons", "parlé", "avec", "hier", "soir", "et", "puis", "vraiment", "dans", "le", "la", "les",
    "une", "un", "pour", "la semaine", "dernière", "selon", "comme", "dit", "on", "écoute", "aujourd'hui", "encore",
    "vous", "savez", "bien", "sûr", "ministre", "réunion", "match", "équipe", "journal",
];
const CAPITALIZED_FILLERS: &[&str] = &[
    "Paris", "Lyon", "Bruxelles", "Europe", "Le", "La", "Bonsoir", "Merci", "Ensuite", "Aujourd'hui", "Marseille",
];
const SURNAMES: &[&str] = &[
    "Dupont", "Durand", "Lefebvre", "Moreau", "Fournier", "Girard", "Lambert", "Fontaine", "Rousseau", "Blanchard",
    "Guérin", "Muller", "Perrin", "Morel", "Chevalier", "Faure", "Mercier", "Bonnet", "Legrand", "Garnier",
];
const SHOUTED: &[&str] = &["ONU", "SNCF", "MARIE", "PAUL", "CLAUDE", "JEAN-PIERRE"];
const HALLUCINATIONS: &[&str] = &[
    "Sous-titrage Société Radio-Canada",
    "sous-titres par Marie Dupont",
    "... Sous-titrage ST' 501",
    "SOUS-TITRES PAR l'équipe de Paul",
    "« Sous-titrage FR 2023 »",
];

struct TextRenderer<'a> {
    pools: &'a NamePools,
    lexicon: &'a NameLexicon,
    lowercase_names: Vec<String>,
}

impl<'a> TextRenderer<'a> {
    fn new(pools: &'a NamePools, lexicon: &'a NameLexicon) -> Self {
        let lowercase_names = ["pierre", "rose", "claude", "marie"]
            .iter()
            .map(|s| s.to_string())
            .chain(lexicon.iter().take(3).map(|r| r.name.to_lowercase()))
            .collect();
        TextRenderer {
            pools,
            lexicon,
            lowercase_names,
        }
    }

    fn is_lexicon_word(&self, w: &str) -> bool {
        self.lexicon.lookup(w).is_some()
    }

    fn filler(&self, rng: &mut ChaCha8Rng, out: &mut Vec<String>) {
        for _ in 0..rng.gen_range(1..=4) {
            out.push(FILLERS.choose(rng).unwrap().to_string());
        }
        match rng.gen_range(0..10) {
            0 => out.push(self.lowercase_names.choose(rng).unwrap().clone()),
            1 => out.push(SHOUTED.choose(rng).unwrap().to_string()),
            2 => {
                let w = CAPITALIZED_FILLERS.choose(rng).unwrap();
                if !self.is_lexicon_word(w) {
                    out.push(w.to_string());
                }
            }
            _ => {}
        }
    }

    fn name_form(&self, rng: &mut ChaCha8Rng, name: &str) -> String {
        if rng.gen_bool(0.05) {
            name.nfd().collect()
        } else {
            name.to_string()
        }
    }

    /// Text whose counted names are exactly `names`, in order.
    fn render(&self, rng: &mut ChaCha8Rng, names: &[String]) -> String {
        let mut words: Vec<String> = Vec::new();
        if rng.gen_bool(0.3) {
            let w = CAPITALIZED_FILLERS.choose(rng).unwrap();
            if !self.is_lexicon_word(w) {
                words.push(w.to_string());
            }
        }
        for name in names {
            self.filler(rng, &mut words);
            let shown = self.name_form(rng, name);
            match rng.gen_range(0..6) {
                0 | 1 => words.push(shown),
                2 => {
                    words.push(shown);
                    let s = SURNAMES.choose(rng).unwrap();
                    if !self.is_lexicon_word(s) {
                        words.push(s.to_string());
                    }
                }
                3 => {
                    // Only the first name of a run counts.
                    words.push(shown);
                    let second = self.pools.pick(rng, Hit::Male).0;
                    words.push(second);
                    words.push(SURNAMES.choose(rng).unwrap().to_string());
                }
                4 => words.push(format!("{shown},")),
                _ => words.push(format!("({shown})")),
            }
        }
        self.filler(rng, &mut words);
        let mut text = words.join(" ");
        text.push(if rng.gen_bool(0.8) { '.' } else { '?' });
        let mut chars = text.chars();
        match chars.next() {
            Some(c) if c.is_lowercase() => c.to_uppercase().chain(chars).collect(),
            _ => text,
        }
    }
}

struct ProgramLayout {
    program: Program,
    breaks: Vec<TimeInterval>,
    media_len: u64,
}

fn daily_start(rng: &mut ChaCha8Rng, medium: Medium, audience: AudienceSlot, minutes: u32) -> NaiveTime {
    let (from, to) = match (medium, audience) {
        (Medium::Tv, AudienceSlot::High) => (18 * 60, 23 * 60),
        (Medium::Tv, AudienceSlot::Low) => (8 * 60, 17 * 60),
        (Medium::Radio, AudienceSlot::High) => (6 * 60, 9 * 60),
        (Medium::Radio, AudienceSlot::Low) => (10 * 60, 17 * 60),
    };
    let latest = (to - minutes).max(from);
    let m = rng.gen_range(from..=latest);
    NaiveTime::from_hms_opt(m / 60, m % 60, 0).unwrap()
}

fn broadcast_date(rng: &mut ChaCha8Rng, conflict: ConflictPeriod) -> NaiveDate {
    match conflict {
        ConflictPeriod::Before => NaiveDate::from_ymd_opt(2023, 5, rng.gen_range(2..=31)).unwrap(),
        ConflictPeriod::After => NaiveDate::from_ymd_opt(2023, 10, rng.gen_range(7..=31)).unwrap(),
    }
}

struct Generator<'a> {
    spec: &'a SynthSpec,
    rng: ChaCha8Rng,
    calendar: CorpusCalendar,
    pools: &'a NamePools,
    renderer: TextRenderer<'a>,
    layouts: Vec<ProgramLayout>,
    segments: Vec<Vec<SpeechSegment>>,
    utterances: Vec<Vec<Utterance>>,
    faces: Vec<Vec<FaceObservation>>,
    reports: Vec<ChannelReport>,
    channel_counters: BTreeMap<(Medium, ChannelStatus), usize>,
}

impl<'a> Generator<'a> {
    fn schedule(&mut self, cell: &CellSpec) -> Result<(ProgramLayout, Vec<Region>), SynthError> {
        let idx = self.layouts.len();
        let rng = &mut self.rng;
        let minutes = rng.gen_range(self.spec.program_minutes.0..=self.spec.program_minutes.1);
        let dur_s = u64::from(minutes) * 60;
        let date = broadcast_date(rng, cell.conflict);
        let local = date.and_time(daily_start(rng, cell.medium, cell.audience, minutes));
        let start_utc = resolve_local(self.calendar.timezone, local);
        let end_utc = start_utc + Duration::seconds(dur_s as i64);
        let lead = rng.gen_range(20..=90u64) * 1000;
        let trail = rng.gen_range(20..=90u64) * 1000;
        let span = TimeInterval::new(lead, lead + dur_s * 1000).expect("positive duration");

        let counter = self.channel_counters.entry((cell.medium, cell.status)).or_insert(0);
        let channel_id = format!("{}-{}-{}", cell.medium, cell.status, *counter % self.spec.channels_per_group + 1);
        *counter += 1;
        let program = Program {
            program_id: format!("p{idx:05}"),
            channel_id,
            medium: cell.medium,
            status: cell.status,
            category: cell.category,
            start_utc,
            end_utc,
            media_id: format!("m{idx:05}"),
            media_span: span,
        };
        if self.calendar.classify_audience(&program) != cell.audience
            || self.calendar.classify_conflict_period(&program) != cell.conflict
        {
            return Err(SynthError::InvalidSpec(format!(
                "program duration {minutes} min cannot be placed in the {} slot",
                cell.audience
            )));
        }

        let mut regions = Vec::new();
        let mut breaks = Vec::new();
        let push = |regions: &mut Vec<Region>, a: u64, b: u64, class: Class| {
            if b > a {
                regions.push(Region {
                    media: idx,
                    span: TimeInterval::new(a, b).unwrap(),
                    class,
                    gendered_ms: 0,
                });
            }
        };
        push(&mut regions, 0, lead, Class::Outside);
        match cell.breaks {
            Some(b) if b.share > 0.0 => {
                let n = if minutes >= 10 { 2 } else { 1 };
                let break_s = ((b.share * dur_s as f64).round() as u64).max(5 * n as u64);
                let break_parts = random_parts(rng, break_s, n, 5);
                let content_parts = random_parts(rng, dur_s - break_s, n + 1, 30);
                let mut t = lead;
                for i in 0..=n {
                    let c = content_parts[i] * 1000;
                    push(&mut regions, t, t + c, Class::Content);
                    t += c;
                    if i < n {
                        let bl = break_parts[i] * 1000;
                        push(&mut regions, t, t + bl, Class::Break);
                        breaks.push(TimeInterval::new(t, t + bl).unwrap());
                        t += bl;
                    }
                }
                if rng.gen_bool(0.5) {
                    // A break before the program starts, outside its span.
                    breaks.insert(0, TimeInterval::new(5_000, 15_000).unwrap());
                }
            }
            _ => push(&mut regions, lead, span.end_ms(), Class::Content),
        }
        push(&mut regions, span.end_ms(), span.end_ms() + trail, Class::Outside);
        for r in &mut regions {
            let frac = match r.class {
                Class::Break => rng.gen_range(0.35..0.6),
                _ => rng.gen_range(0.55..0.85),
            };
            r.gendered_ms = (r.span.duration_ms() as f64 * frac).round() as u64;
        }
        Ok((
            ProgramLayout {
                program,
                breaks,
                media_len: span.end_ms() + trail,
            },
            regions,
        ))
    }

    /// Lays out the pieces of one region and returns its utterance slots.
    fn fill_region(&mut self, region: &Region, female_ms: u64, slots: &mut Vec<Slot>) {
        let rng = &mut self.rng;
        #[derive(Clone, Copy)]
        enum Kind {
            Label(SegmentLabel),
            Gap,
        }
        let mut pieces: Vec<(Kind, u64)> = Vec::new();
        for len in split_total(rng, female_ms) {
            pieces.push((Kind::Label(SegmentLabel::FemaleSpeech), len));
        }
        for len in split_total(rng, region.gendered_ms - female_ms) {
            pieces.push((Kind::Label(SegmentLabel::MaleSpeech), len));
        }
        for len in split_total(rng, region.span.duration_ms() - region.gendered_ms) {
            let kind = match rng.gen_range(0..5) {
                0 | 1 => Kind::Label(SegmentLabel::Music),
                2 => Kind::Label(SegmentLabel::Noise),
                _ => Kind::Gap,
            };
            pieces.push((kind, len));
        }
        pieces.shuffle(rng);
        let mut t = region.span.start_ms();
        for (kind, len) in pieces {
            let span = TimeInterval::new(t, t + len).unwrap();
            t += len;
            let Kind::Label(label) = kind else { continue };
            self.segments[region.media].push(SpeechSegment {
                media_id: self.layouts[region.media].program.media_id.clone(),
                span,
                label,
            });
            let gendered = matches!(label, SegmentLabel::FemaleSpeech | SegmentLabel::MaleSpeech);
            if gendered && len >= UTTERANCE_MIN_PIECE_MS {
                let slack = ((len - 1000) / 2).min(200);
                let a = rng.gen_range(0..=slack);
                let b = rng.gen_range(0..=slack);
                slots.push(Slot {
                    media: region.media,
                    span: TimeInterval::new(span.start_ms() + a, span.end_ms() - b).unwrap(),
                    female_speaker: label == SegmentLabel::FemaleSpeech,
                    class: region.class,
                    hits: Vec::new(),
                });
            }
        }
        debug_assert_eq!(t, region.span.end_ms());
    }

    fn face_slots(&mut self, region: &Region, out: &mut Vec<FaceSlot>) {
        let rng = &mut self.rng;
        let media_id = self.layouts[region.media].program.media_id.clone();
        let mut frame = region.span.start_ms().div_ceil(FRAME_MS) * FRAME_MS;
        while frame < region.span.end_ms() {
            let n = match rng.gen_range(0..20) {
                0..=8 => 0,
                9..=16 => 1,
                _ => 2,
            };
            for _ in 0..n {
                let height = if rng.gen_bool(0.05) { 0.10 } else { rng.gen_range(0.10..0.6) };
                out.push(FaceSlot {
                    media: region.media,
                    frame_ms: frame,
                    height,
                    class: region.class,
                });
            }
            if rng.gen_bool(0.1) {
                // Too small to count.
                self.faces[region.media].push(FaceObservation {
                    media_id: media_id.clone(),
                    frame_ms: frame,
                    height_ratio: rng.gen_range(0.02..0.0999),
                    female_score: rng.gen_range(0.0..=1.0),
                });
            }
            frame += FRAME_MS;
        }
    }

    fn face_score(rng: &mut ChaCha8Rng, female: bool) -> f64 {
        if female {
            rng.gen_range(0.500_001..=1.0)
        } else if rng.gen_bool(0.05) {
            0.5
        } else {
            rng.gen_range(0.0..0.5)
        }
    }

    fn reports_for(&mut self, program_id: &str, persons: u64, women: u64) {
        let rng = &mut self.rng;
        let mut roles: Vec<Role> = Role::ALL.to_vec();
        roles.shuffle(rng);
        let r = rng.gen_range(1..=3usize).min(persons as usize).max(1);
        roles.truncate(r);
        roles.sort();
        let w = random_parts(rng, women, r, 0);
        let m = random_parts(rng, persons - women, r, 0);
        for (i, role) in roles.into_iter().enumerate() {
            self.reports.push(ChannelReport {
                program_id: program_id.to_string(),
                role,
                male_count: m[i],
                female_count: w[i],
            });
        }
    }

    fn assign_hits(&mut self, slots: &mut [Slot], idxs: &[usize], pct: f64, pure_only: bool) {
        let rng = &mut self.rng;
        let (lo, hi) = self.spec.hits_per_utterance;
        let mut pure: Vec<(usize, usize)> = Vec::new();
        let mut neutral_mass_estimate = 0.0;
        let mut total = 0u64;
        for &i in idxs {
            let n = if pure_only { 1 } else { rng.gen_range(lo..=hi) };
            for _ in 0..n {
                let h = slots[i].hits.len();
                if !pure_only && rng.gen_bool(self.spec.neutral_name_share) && !self.pools.neutral.is_empty() {
                    slots[i].hits.push(Hit::Neutral);
                    neutral_mass_estimate += self.pools.neutral_mean;
                } else {
                    slots[i].hits.push(Hit::Male);
                    pure.push((i, h));
                }
                total += 1;
            }
        }
        let wanted = (pct / 100.0 * total as f64 - neutral_mass_estimate).round().max(0.0) as u64;
        let k = wanted.min(pure.len() as u64) as usize;
        pure.shuffle(rng);
        for &(i, h) in &pure[..k] {
            slots[i].hits[h] = Hit::Female;
        }
    }

    fn run(mut self) -> Result<(CorpusBundle, SynthManifest), SynthError> {
        let mut truths = Vec::new();
        let cells = self.spec.cells.clone();
        for cell in &cells {
            let mut regions = Vec::new();
            let first = self.layouts.len();
            for _ in 0..cell.programs {
                let (layout, rs) = self.schedule(cell)?;
                self.layouts.push(layout);
                self.segments.push(Vec::new());
                self.utterances.push(Vec::new());
                self.faces.push(Vec::new());
                regions.extend(rs);
            }
            let program_ids: Vec<String> = self.layouts[first..].iter().map(|l| l.program.program_id.clone()).collect();
            let class_rates = |class: Class| -> Rates {
                match class {
                    Class::Content => cell.rates,
                    Class::Break => cell.breaks.map_or(cell.rates, |b| b.rates),
                    Class::Outside => Rates::new(50.0, 50.0, 50.0, 50.0),
                }
            };

            // Speech: female time per class, apportioned over regions.
            let mut female_ms = vec![0u64; regions.len()];
            let mut speech = BTreeMap::new();
            for class in [Class::Content, Class::Break, Class::Outside] {
                let idx: Vec<usize> = (0..regions.len()).filter(|&i| regions[i].class == class).collect();
                let caps: Vec<u64> = idx.iter().map(|&i| regions[i].gendered_ms).collect();
                let total: u64 = caps.iter().sum();
                let k = target_count(class_rates(class).wsr, total);
                for (j, share) in apportion(k, &caps).into_iter().enumerate() {
                    female_ms[idx[j]] = share;
                }
                speech.insert(class as u8, (k, total));
            }
            let mut slots = Vec::new();
            for (i, region) in regions.iter().enumerate() {
                self.fill_region(region, female_ms[i], &mut slots);
            }

            // Names. A few utterances are transcriber hallucinations.
            let mut kept = Vec::with_capacity(slots.len());
            for slot in slots {
                if self.rng.gen_bool(0.03) {
                    let text = HALLUCINATIONS.choose(&mut self.rng).unwrap().to_string();
                    self.utterances[slot.media].push(Utterance {
                        media_id: self.layouts[slot.media].program.media_id.clone(),
                        span: slot.span,
                        text,
                    });
                } else {
                    kept.push(slot);
                }
            }
            let mut slots = kept;
            for class in [Class::Content, Class::Break, Class::Outside] {
                let idx: Vec<usize> = (0..slots.len()).filter(|&i| slots[i].class == class).collect();
                match (class, cell.speaker_rates) {
                    (Class::Content, Some(sr)) => {
                        let (fem, mal): (Vec<usize>, Vec<usize>) =
                            idx.into_iter().partition(|&i| slots[i].female_speaker);
                        self.assign_hits(&mut slots, &fem, sr.female_speaker, true);
                        self.assign_hits(&mut slots, &mal, sr.male_speaker, true);
                    }
                    _ => self.assign_hits(&mut slots, &idx, class_rates(class).wqr, false),
                }
            }
            let mut quotes: BTreeMap<u8, (f64, u64)> = BTreeMap::new();
            let (mut fem_sp, mut male_sp) = (GroupSum::default(), GroupSum::default());
            for slot in &slots {
                let named: Vec<(String, f64)> = slot.hits.iter().map(|&h| self.pools.pick(&mut self.rng, h)).collect();
                let mass: f64 = named.iter().map(|n| n.1).sum();
                let e = quotes.entry(slot.class as u8).or_insert((0.0, 0));
                e.0 += mass;
                e.1 += named.len() as u64;
                if slot.class == Class::Content && !named.is_empty() {
                    let y = mass / named.len() as f64;
                    if slot.female_speaker {
                        fem_sp.add(y);
                    } else {
                        male_sp.add(y);
                    }
                }
                let names: Vec<String> = named.into_iter().map(|n| n.0).collect();
                let text = self.renderer.render(&mut self.rng, &names);
                self.utterances[slot.media].push(Utterance {
                    media_id: self.layouts[slot.media].program.media_id.clone(),
                    span: slot.span,
                    text,
                });
            }

            // Faces, TV only.
            let mut faces_truth = BTreeMap::new();
            if cell.medium == Medium::Tv {
                let mut fslots = Vec::new();
                for region in &regions {
                    self.face_slots(region, &mut fslots);
                }
                for class in [Class::Content, Class::Break, Class::Outside] {
                    let mut idx: Vec<usize> = (0..fslots.len()).filter(|&i| fslots[i].class == class).collect();
                    let k = target_count(class_rates(class).wfr, idx.len() as u64);
                    faces_truth.insert(class as u8, (k, idx.len() as u64));
                    idx.shuffle(&mut self.rng);
                    let female: BTreeSet<usize> = idx[..k as usize].iter().copied().collect();
                    for i in idx {
                        let s = &fslots[i];
                        let score = Self::face_score(&mut self.rng, female.contains(&i));
                        self.faces[s.media].push(FaceObservation {
                            media_id: self.layouts[s.media].program.media_id.clone(),
                            frame_ms: s.frame_ms,
                            height_ratio: s.height,
                            female_score: score,
                        });
                    }
                }
            }

            // Channel reports.
            let persons: Vec<u64> = (0..cell.programs)
                .map(|_| u64::from(self.rng.gen_range(self.spec.persons_per_program.0..=self.spec.persons_per_program.1)))
                .collect();
            let total_persons: u64 = persons.iter().sum();
            let women_total = target_count(cell.rates.wpr, total_persons);
            let women = apportion(women_total, &persons);
            for (j, pid) in program_ids.iter().enumerate() {
                self.reports_for(pid, persons[j], women[j]);
            }

            let value = |kind: MetricKind, female: f64, weight: f64| {
                if weight > 0.0 {
                    MetricValue::new(kind, female, weight)
                } else {
                    MetricValue::undefined(kind)
                }
            };
            let metrics_for = |class: Class| -> Metrics {
                let (sf, st) = speech[&(class as u8)];
                let (qm, qn) = quotes.get(&(class as u8)).copied().unwrap_or((0.0, 0));
                Metrics {
                    wpr: (class == Class::Content)
                        .then(|| value(MetricKind::Wpr, women_total as f64, total_persons as f64)),
                    wsr: Some(value(MetricKind::Wsr, sf as f64, st as f64)),
                    wqr: Some(value(MetricKind::Wqr, qm, qn as f64)),
                    wfr: faces_truth
                        .get(&(class as u8))
                        .map(|&(k, n)| value(MetricKind::Wfr, k as f64, n as f64)),
                }
            };
            let has_breaks = cell.breaks.is_some_and(|b| b.share > 0.0) && cell.programs > 0;
            truths.push(CellTruth {
                key: cell.key(),
                program_ids,
                in_program: metrics_for(Class::Content),
                in_break: has_breaks.then(|| metrics_for(Class::Break)),
                female_speakers: fem_sp,
                male_speakers: male_sp,
            });
        }
        self.finish(truths)
    }

    fn finish(self, cells: Vec<CellTruth>) -> Result<(CorpusBundle, SynthManifest), SynthError> {
        let mut bundle = CorpusBundle {
            lexicon: self.renderer.lexicon.clone(),
            reports: self.reports,
            ..CorpusBundle::default()
        };
        let programs = self.layouts.len();
        for (((layout, mut segs), mut utts), mut faces) in self
            .layouts
            .into_iter()
            .zip(self.segments)
            .zip(self.utterances)
            .zip(self.faces)
        {
            let media = layout.program.media_id.clone();
            debug_assert!(segs.iter().all(|s| s.span.end_ms() <= layout.media_len));
            segs.sort_by_key(|s| s.span);
            utts.sort_by_key(|u| u.span);
            faces.sort_by_key(|f| f.frame_ms);
            if !layout.breaks.is_empty() {
                bundle.breaks.insert(media.clone(), layout.breaks);
            }
            bundle.segments.insert(media.clone(), segs);
            bundle.utterances.insert(media.clone(), utts);
            if !faces.is_empty() {
                bundle.faces.insert(media.clone(), faces);
            }
            bundle.programs.insert(layout.program.program_id.clone(), layout.program);
        }
        let manifest = SynthManifest {
            seed: self.spec.seed,
            programs,
            cells,
        };
        Ok((bundle, manifest))
    }
}

/// Builds the bundle and its ground truth in memory.
pub fn generate(spec: &SynthSpec) -> Result<(CorpusBundle, SynthManifest), SynthError> {
    spec.validate()?;
    let lexicon = match &spec.lexicon {
        Some(path) => {
            let file = fs::File::open(path).map_err(|source| SynthError::Io {
                path: path.clone(),
                source,
            })?;
            parse_name_db(std::io::BufReader::new(file))?
        }
        None => fixture_lexicon(),
    };
    let pools = NamePools::new(&lexicon)?;
    let generator = Generator {
        spec,
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        calendar: CorpusCalendar::default(),
        pools: &pools,
        renderer: TextRenderer::new(&pools, &lexicon),
        layouts: Vec::new(),
        segments: Vec::new(),
        utterances: Vec::new(),
        faces: Vec::new(),
        reports: Vec::new(),
        channel_counters: BTreeMap::new(),
    };
    generator.run()
}

/// Writes the bundle files and `truth.json` into `dir`.
pub fn generate_to_dir(spec: &SynthSpec, dir: impl AsRef<Path>) -> Result<SynthManifest, SynthError> {
    let (bundle, manifest) = generate(spec)?;
    bundle.write_dir(dir.as_ref())?;
    write_manifest(&manifest, dir.as_ref().join(MANIFEST_FILE))?;
    Ok(manifest)
}

pub fn write_manifest(manifest: &SynthManifest, path: impl AsRef<Path>) -> Result<(), SynthError> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(manifest)?;
    text.push('\n');
    fs::write(path, text).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<SynthManifest, SynthError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}

/// Reads and validates a JSON generator spec.
pub fn read_spec(path: impl AsRef<Path>) -> Result<SynthSpec, SynthError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SynthError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let spec: SynthSpec = serde_json::from_str(&text)?;
    spec.validate()?;
    Ok(spec)
}

/// Direct generator of analysis rows, bypassing descriptor streams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub seed: u64,
    pub rows: usize,
    /// Probability that a row's speaker is a woman.
    pub female_speaker_share: f64,
    /// Planted mean of y for female and male speakers. `None` draws every
    /// y independently of all factors.
    pub speaker_means: Option<(f64, f64)>,
    /// Additive shift of the mean of y per category, planted on top of the
    /// speaker means.
    pub category_shifts: Vec<(ProgramCategory, f64)>,
}

impl PopulationSpec {
    pub fn planted(seed: u64, rows: usize, female: f64, male: f64) -> Self {
        PopulationSpec {
            seed,
            rows,
            female_speaker_share: 0.4,
            speaker_means: Some((female, male)),
            category_shifts: Vec::new(),
        }
    }

    pub fn null(seed: u64, rows: usize) -> Self {
        PopulationSpec {
            seed,
            rows,
            female_speaker_share: 0.4,
            speaker_means: None,
            category_shifts: Vec::new(),
        }
    }
}

/// Channels of the population generator: 15 radio and 26 TV.
fn population_channels() -> Vec<(String, Medium, ChannelStatus)> {
    let mut out = Vec::new();
    for (medium, status, n) in [
        (Medium::Radio, ChannelStatus::Public, 7),
        (Medium::Radio, ChannelStatus::Private, 8),
        (Medium::Tv, ChannelStatus::Public, 8),
        (Medium::Tv, ChannelStatus::Private, 18),
    ] {
        for i in 1..=n {
            out.push((format!("{medium}-{status}-{i:02}"), medium, status));
        }
    }
    out
}

/// Rows with binary y. With planted means, each (speaker gender, category)
/// group gets exactly `round(p * n)` ones, where `p` is the speaker mean
/// plus the category shift.
pub fn generate_population(spec: &PopulationSpec) -> Result<Vec<AnalysisRow>, SynthError> {
    if !(0.0..=1.0).contains(&spec.female_speaker_share) {
        return Err(SynthError::InvalidSpec("female_speaker_share must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let channels = population_channels();
    let mut rows: Vec<AnalysisRow> = (0..spec.rows)
        .map(|_| {
            let (channel, medium, status) = channels.choose(&mut rng).unwrap().clone();
            let mut levels: [String; 7] = Default::default();
            levels[Factor::Medium.index()] = medium.token().into();
            levels[Factor::Channel.index()] = channel;
            levels[Factor::Status.index()] = status.token().into();
            levels[Factor::Category.index()] = ProgramCategory::ALL.choose(&mut rng).unwrap().token().into();
            levels[Factor::Audience.index()] = AudienceSlot::ALL.choose(&mut rng).unwrap().token().into();
            levels[Factor::Conflict.index()] = ConflictPeriod::ALL.choose(&mut rng).unwrap().token().into();
            levels[Factor::SpeakerGender.index()] =
                if rng.gen_bool(spec.female_speaker_share) { "female" } else { "male" }.into();
            AnalysisRow::new(0.0, levels)
        })
        .collect();
    match spec.speaker_means {
        None => {
            for r in &mut rows {
                r.y = f64::from(u8::from(rng.gen_bool(0.3)));
            }
        }
        Some((female, male)) => {
            let shift = |cat: &str| {
                spec.category_shifts
                    .iter()
                    .find(|(c, _)| c.token() == cat)
                    .map_or(0.0, |(_, s)| *s)
            };
            let mut groups: BTreeMap<(String, String), Vec<usize>> = BTreeMap::new();
            for (i, r) in rows.iter().enumerate() {
                let key = (r.level(Factor::SpeakerGender).to_string(), r.level(Factor::Category).to_string());
                groups.entry(key).or_default().push(i);
            }
            for ((gender, cat), mut idx) in groups {
                let base = if gender == "female" { female } else { male };
                let p = base + shift(&cat);
                if !(0.0..=1.0).contains(&p) {
                    return Err(SynthError::InvalidSpec(format!("planted mean {p} outside [0, 1]")));
                }
                let k = (p * idx.len() as f64).round() as usize;
                idx.shuffle(&mut rng);
                for &i in &idx[..k] {
                    rows[i].y = 1.0;
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::validate_bundle;
    use crate::namex::NameExtractor;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn fixture_lexicon_shape() {
        let lex = fixture_lexicon();
        assert!(lex.len() >= 190);
        let claude = lex.get("Claude").unwrap();
        assert_eq!(claude.total_count, 468_462);
        assert_eq!((claude.female_prob * 100.0).round(), 12.0);
        assert!((lex.get("Marie").unwrap().female_prob - 0.998).abs() < 1e-15);
        assert_eq!(lex.get("Vladimir").unwrap().female_prob, 0.0);
    }

    #[test]
    fn distractor_words_are_not_names() {
        let lex = fixture_lexicon();
        let ex = NameExtractor::new(&lex);
        for w in FILLERS.iter().chain(CAPITALIZED_FILLERS).chain(SURNAMES).chain(SHOUTED) {
            for part in w.split_whitespace() {
                let mut chars = part.chars();
                let capitalized: String = chars.next().unwrap().to_uppercase().chain(chars).collect();
                assert!(ex.extract_text(part).hits.is_empty(), "{part} would count as a name");
                assert!(ex.extract_text(&capitalized).hits.is_empty(), "{capitalized} would count as a name");
            }
        }
    }

    #[test]
    fn rendered_text_counts_exactly_the_planted_names() {
        let lex = fixture_lexicon();
        let pools = NamePools::new(&lex).unwrap();
        let renderer = TextRenderer::new(&pools, &lex);
        let ex = NameExtractor::new(&lex);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..2000 {
            let n = rng.gen_range(0..4);
            let names: Vec<String> = (0..n)
                .map(|_| {
                    let kind = [Hit::Female, Hit::Male, Hit::Neutral][rng.gen_range(0..3)];
                    pools.pick(&mut rng, kind).0
                })
                .collect();
            let text = renderer.render(&mut rng, &names);
            let hits: Vec<String> = ex
                .extract_text(&text)
                .hits
                .into_iter()
                .map(|h| crate::ingest::canonical_name(&h.surface))
                .collect();
            assert_eq!(hits, names, "{text}");
        }
    }

    #[test]
    fn apportion_is_exact_and_capped() {
        assert_eq!(apportion(5, &[1, 1, 1, 1, 1, 1]), vec![1, 1, 1, 1, 1, 0]);
        assert_eq!(apportion(0, &[3, 4]), vec![0, 0]);
        assert_eq!(apportion(7, &[3, 4]), vec![3, 4]);
        assert_eq!(apportion(3, &[0, 0]), vec![0, 0]);
    }

    proptest! {
        #[test]
        fn apportion_properties(caps in prop::collection::vec(0u64..10_000, 1..20), frac in 0.0f64..=1.0) {
            let total: u64 = caps.iter().sum();
            let k = (frac * total as f64).floor() as u64;
            let shares = apportion(k, &caps);
            prop_assert_eq!(shares.iter().sum::<u64>(), if total == 0 { 0 } else { k });
            for (s, c) in shares.iter().zip(&caps) {
                prop_assert!(s <= c);
            }
        }
    }

    #[test]
    fn spec_guards() {
        let mut spec = SynthSpec::default_corpus(1, 1);
        spec.cells[0].rates.wsr = 120.0;
        assert!(matches!(generate(&spec), Err(SynthError::InvalidSpec(_))));
        let mut spec = SynthSpec::default_corpus(1, 1);
        let dup = spec.cells[0].clone();
        spec.cells.push(dup);
        assert!(matches!(generate(&spec), Err(SynthError::InvalidSpec(_))));
    }

    #[test]
    fn deterministic_and_valid() {
        let spec = SynthSpec::default_corpus(42, 1);
        let (a, ma) = generate(&spec).unwrap();
        let (b, mb) = generate(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(ma, mb);
        let report = validate_bundle(&a).unwrap();
        assert!(report.warnings.is_empty(), "{:?}", report.warnings);
        assert_eq!(a.programs.len(), spec.total_programs());
    }

    #[test]
    fn planted_population_means() {
        let rows = generate_population(&PopulationSpec::planted(3, 5000, 0.369, 0.282)).unwrap();
        let means = crate::stats::group_means(&rows, &[Factor::SpeakerGender]);
        assert!((means[&vec!["female".to_string()]].0 - 0.369).abs() < 0.005);
        assert!((means[&vec!["male".to_string()]].0 - 0.282).abs() < 0.005);
    }
}
