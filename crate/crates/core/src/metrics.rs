//! The four representation estimates over program subsets, with optional
//! commercial-break exclusion, and their group-by aggregation.
//!
//! Descriptors are attributed to time spans by granularity: speech segments
//! are clipped by overlap, faces belong to the span containing their frame
//! timestamp, utterances to the span containing their midpoint.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::CorpusBundle;
use crate::model::{
    interval_intersect_all, interval_subtract, AudienceSlot, ChannelReport, ChannelStatus, ConflictPeriod,
    CorpusCalendar, FaceObservation, Medium, MetricKind, MetricValue, ModelError, Program, ProgramCategory,
    SegmentLabel, SpeechSegment, TimeInterval, Utterance,
};
use crate::namex::{CorpusNameStats, UtteranceNameStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMode {
    /// Program time minus commercial breaks.
    ExcludeBreaks,
    /// Commercial breaks only.
    OnlyBreaks,
    /// The whole program span.
    Raw,
}

impl FromStr for SpanMode {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exclude-breaks" | "exclude_breaks" => Ok(SpanMode::ExcludeBreaks),
            "only-breaks" | "only_breaks" => Ok(SpanMode::OnlyBreaks),
            "raw" => Ok(SpanMode::Raw),
            other => Err(ModelError::UnknownToken {
                kind: "ad-exclusion mode",
                token: other.into(),
            }),
        }
    }
}

impl fmt::Display for SpanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpanMode::ExcludeBreaks => "exclude-breaks",
            SpanMode::OnlyBreaks => "only-breaks",
            SpanMode::Raw => "raw",
        })
    }
}

/// Media spans of `program` selected by `mode`, sorted and disjoint.
pub fn effective_spans(program: &Program, breaks: &[TimeInterval], mode: SpanMode) -> Vec<TimeInterval> {
    match mode {
        SpanMode::ExcludeBreaks => interval_subtract(program.media_span, breaks),
        SpanMode::OnlyBreaks => interval_intersect_all(program.media_span, breaks),
        SpanMode::Raw => vec![program.media_span],
    }
}

/// Share of female speech among gendered speech, segments clipped to `spans`.
/// Music (singing included) and noise are ignored.
pub fn compute_wsr(segments: &[SpeechSegment], spans: &[TimeInterval]) -> MetricValue {
    let (mut female, mut male) = (0u64, 0u64);
    for span in spans {
        let first = segments.partition_point(|s| s.span.end_ms() <= span.start_ms());
        for seg in segments[first..].iter().take_while(|s| s.span.start_ms() < span.end_ms()) {
            match seg.label {
                SegmentLabel::FemaleSpeech => female += seg.span.overlap_ms(*span),
                SegmentLabel::MaleSpeech => male += seg.span.overlap_ms(*span),
                SegmentLabel::Music | SegmentLabel::Noise => {}
            }
        }
    }
    if female + male == 0 {
        MetricValue::undefined(MetricKind::Wsr)
    } else {
        MetricValue::new(MetricKind::Wsr, female as f64, (female + male) as f64)
    }
}

/// Face filtering and gender decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceRule {
    /// Minimum face height as a fraction of frame height (inclusive).
    pub min_height: f64,
    /// A face is female iff its score is strictly above this value.
    pub female_score_above: f64,
}

impl Default for FaceRule {
    fn default() -> Self {
        FaceRule {
            min_height: 0.10,
            female_score_above: 0.5,
        }
    }
}

/// `faces` must be sorted by frame time.
pub fn compute_wfr(faces: &[FaceObservation], spans: &[TimeInterval], rule: &FaceRule) -> MetricValue {
    let (mut female, mut total) = (0u64, 0u64);
    for span in spans {
        let first = faces.partition_point(|f| f.frame_ms < span.start_ms());
        for face in faces[first..].iter().take_while(|f| f.frame_ms < span.end_ms()) {
            if face.height_ratio >= rule.min_height {
                total += 1;
                if face.female_score > rule.female_score_above {
                    female += 1;
                }
            }
        }
    }
    if total == 0 {
        MetricValue::undefined(MetricKind::Wfr)
    } else {
        MetricValue::new(MetricKind::Wfr, female as f64, total as f64)
    }
}

/// Quotation rate over utterances whose midpoint lies in `spans`.
/// `stats` runs parallel to `utterances`; `None` entries (dropped
/// hallucinations) are skipped.
pub fn compute_wqr(utterances: &[Utterance], stats: &[Option<UtteranceNameStats>], spans: &[TimeInterval]) -> MetricValue {
    let (mut mass, mut hits) = (0.0f64, 0usize);
    for (u, s) in utterances.iter().zip(stats) {
        let Some(s) = s else { continue };
        if s.hits.is_empty() {
            continue;
        }
        let mid = u.span.midpoint_ms();
        if spans.iter().any(|sp| sp.contains_ms(mid)) {
            mass += s.female_mass();
            hits += s.hits.len();
        }
    }
    if hits == 0 {
        MetricValue::undefined(MetricKind::Wqr)
    } else {
        MetricValue::new(MetricKind::Wqr, mass, hits as f64)
    }
}

pub fn compute_wpr<'a>(reports: impl IntoIterator<Item = &'a ChannelReport>) -> MetricValue {
    let (female, total) = reports
        .into_iter()
        .fold((0u64, 0u64), |(f, t), r| (f + r.female_count, t + r.female_count + r.male_count));
    if total == 0 {
        MetricValue::undefined(MetricKind::Wpr)
    } else {
        MetricValue::new(MetricKind::Wpr, female as f64, total as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdContext {
    InProgram,
    InBreak,
}

impl AdContext {
    pub fn token(self) -> &'static str {
        match self {
            AdContext::InProgram => "in_program",
            AdContext::InBreak => "in_break",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Medium,
    Status,
    Category,
    Audience,
    Conflict,
    Channel,
    AdContext,
}

impl FromStr for Dimension {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "medium" => Dimension::Medium,
            "status" => Dimension::Status,
            "category" => Dimension::Category,
            "audience" => Dimension::Audience,
            "conflict" => Dimension::Conflict,
            "channel" => Dimension::Channel,
            "ad-context" | "ad_context" => Dimension::AdContext,
            other => {
                return Err(ModelError::UnknownToken {
                    kind: "grouping dimension",
                    token: other.into(),
                })
            }
        })
    }
}

/// Group identity. `None` fields are marginalized over.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub medium: Option<Medium>,
    pub status: Option<ChannelStatus>,
    pub category: Option<ProgramCategory>,
    pub audience: Option<AudienceSlot>,
    pub conflict: Option<ConflictPeriod>,
    pub channel_id: Option<String>,
    pub ad_context: Option<AdContext>,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = [
            self.medium.map(|v| format!("medium={v}")),
            self.status.map(|v| format!("status={v}")),
            self.category.map(|v| format!("category={v}")),
            self.audience.map(|v| format!("audience={v}")),
            self.conflict.map(|v| format!("conflict={v}")),
            self.channel_id.as_ref().map(|v| format!("channel={v}")),
            self.ad_context.map(|v| format!("ad_context={}", v.token())),
        ]
        .into_iter()
        .flatten()
        .collect();
        if parts.is_empty() {
            f.write_str("all")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

/// Restricts which programs enter an aggregation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgramFilter {
    pub medium: Option<Medium>,
    pub status: Option<ChannelStatus>,
    pub category: Option<ProgramCategory>,
    /// Keep only channels for which commercial-break timecodes exist.
    pub channels_with_breaks: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grouping {
    pub dims: Vec<Dimension>,
    pub filter: ProgramFilter,
}

impl Grouping {
    pub fn by(dims: &[Dimension]) -> Self {
        Grouping {
            dims: dims.to_vec(),
            filter: ProgramFilter::default(),
        }
    }

    pub fn with_filter(mut self, filter: ProgramFilter) -> Self {
        self.filter = filter;
        self
    }
}

/// How per-program values combine into a group value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Sum numerators and weights (durations, counts) across programs.
    #[default]
    Exact,
    /// Mean of per-program percentages, each defined program counting once.
    ProgramMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsConfig {
    pub calendar: CorpusCalendar,
    pub faces: FaceRule,
    pub weighting: Weighting,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            calendar: CorpusCalendar::default(),
            faces: FaceRule::default(),
            weighting: Weighting::Exact,
        }
    }
}

/// Metric bundle for one program or group. `None` means not applicable:
/// WFR on radio, WPR on commercial-break content.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub wpr: Option<MetricValue>,
    pub wsr: Option<MetricValue>,
    pub wqr: Option<MetricValue>,
    pub wfr: Option<MetricValue>,
}

fn merge_opt(a: Option<MetricValue>, b: Option<MetricValue>) -> Option<MetricValue> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.merge(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn program_mean(v: Option<MetricValue>) -> Option<MetricValue> {
    v.map(|m| match m.female_pct() {
        Some(p) => MetricValue::new(m.kind, p / 100.0, 1.0),
        None => MetricValue::undefined(m.kind),
    })
}

impl Metrics {
    pub const EMPTY: Metrics = Metrics {
        wpr: None,
        wsr: None,
        wqr: None,
        wfr: None,
    };

    pub fn merge(self, other: Metrics) -> Metrics {
        Metrics {
            wpr: merge_opt(self.wpr, other.wpr),
            wsr: merge_opt(self.wsr, other.wsr),
            wqr: merge_opt(self.wqr, other.wqr),
            wfr: merge_opt(self.wfr, other.wfr),
        }
    }

    pub fn get(&self, kind: MetricKind) -> Option<MetricValue> {
        match kind {
            MetricKind::Wpr => self.wpr,
            MetricKind::Wsr => self.wsr,
            MetricKind::Wqr => self.wqr,
            MetricKind::Wfr => self.wfr,
        }
    }

    fn weighted(self, weighting: Weighting) -> Metrics {
        match weighting {
            Weighting::Exact => self,
            Weighting::ProgramMean => Metrics {
                wpr: program_mean(self.wpr),
                wsr: program_mean(self.wsr),
                wqr: program_mean(self.wqr),
                wfr: program_mean(self.wfr),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupResult {
    pub key: GroupKey,
    pub programs: usize,
    pub metrics: Metrics,
}

/// Computes one program's metrics over the spans selected by `mode`.
pub fn program_metrics(
    bundle: &CorpusBundle,
    names: &CorpusNameStats,
    program: &Program,
    mode: SpanMode,
    faces: &FaceRule,
) -> Metrics {
    let reports: Vec<&ChannelReport> = bundle
        .reports
        .iter()
        .filter(|r| r.program_id == program.program_id)
        .collect();
    metrics_with_reports(bundle, names, program, &reports, mode, faces)
}

fn metrics_with_reports(
    bundle: &CorpusBundle,
    names: &CorpusNameStats,
    program: &Program,
    reports: &[&ChannelReport],
    mode: SpanMode,
    faces: &FaceRule,
) -> Metrics {
    let media = &program.media_id;
    let breaks = bundle.breaks.get(media).map_or(&[][..], Vec::as_slice);
    let spans = effective_spans(program, breaks, mode);
    let segments = bundle.segments.get(media).map_or(&[][..], Vec::as_slice);
    let utterances = bundle.utterances.get(media).map_or(&[][..], Vec::as_slice);
    let stats = names.get(media).map_or(&[][..], Vec::as_slice);
    let wpr = (mode != SpanMode::OnlyBreaks)
        .then(|| compute_wpr(reports.iter().copied()));
    let wfr = (program.medium == Medium::Tv).then(|| {
        let list = bundle.faces.get(media).map_or(&[][..], Vec::as_slice);
        compute_wfr(list, &spans, faces)
    });
    Metrics {
        wpr,
        wsr: Some(compute_wsr(segments, &spans)),
        wqr: Some(compute_wqr(utterances, stats, &spans)),
        wfr,
    }
}

fn key_for(program: &Program, dims: &[Dimension], calendar: &CorpusCalendar, ad: Option<AdContext>) -> GroupKey {
    let mut key = GroupKey::default();
    for dim in dims {
        match dim {
            Dimension::Medium => key.medium = Some(program.medium),
            Dimension::Status => key.status = Some(program.status),
            Dimension::Category => key.category = Some(program.category),
            Dimension::Audience => key.audience = Some(calendar.classify_audience(program)),
            Dimension::Conflict => key.conflict = Some(calendar.classify_conflict_period(program)),
            Dimension::Channel => key.channel_id = Some(program.channel_id.clone()),
            Dimension::AdContext => key.ad_context = ad,
        }
    }
    key
}

/// Groups programs and merges their metrics. With an ad-context dimension,
/// each program contributes its break-free content and its break content to
/// two different groups and `mode` is ignored. Output is ordered by key.
pub fn aggregate(
    bundle: &CorpusBundle,
    names: &CorpusNameStats,
    grouping: &Grouping,
    mode: SpanMode,
    config: &MetricsConfig,
) -> Vec<GroupResult> {
    let by_ad = grouping.dims.contains(&Dimension::AdContext);
    let with_breaks = bundle.channels_with_breaks();
    let f = &grouping.filter;
    let mut reports: BTreeMap<&str, Vec<&ChannelReport>> = BTreeMap::new();
    for r in &bundle.reports {
        reports.entry(r.program_id.as_str()).or_default().push(r);
    }
    let mut groups: BTreeMap<GroupKey, (usize, Metrics)> = BTreeMap::new();
    for program in bundle.programs.values() {
        if f.medium.is_some_and(|m| m != program.medium)
            || f.status.is_some_and(|s| s != program.status)
            || f.category.is_some_and(|c| c != program.category)
            || (f.channels_with_breaks && !with_breaks.contains(program.channel_id.as_str()))
        {
            continue;
        }
        let contributions: Vec<(Option<AdContext>, SpanMode)> = if by_ad {
            vec![
                (Some(AdContext::InProgram), SpanMode::ExcludeBreaks),
                (Some(AdContext::InBreak), SpanMode::OnlyBreaks),
            ]
        } else {
            vec![(None, mode)]
        };
        for (ad, span_mode) in contributions {
            let own = reports.get(program.program_id.as_str()).map_or(&[][..], Vec::as_slice);
            let m = metrics_with_reports(bundle, names, program, own, span_mode, &config.faces)
                .weighted(config.weighting);
            let key = key_for(program, &grouping.dims, &config.calendar, ad);
            let entry = groups.entry(key).or_insert((0, Metrics::EMPTY));
            entry.0 += 1;
            entry.1 = entry.1.merge(m);
        }
    }
    groups
        .into_iter()
        .map(|(key, (programs, metrics))| GroupResult { key, programs, metrics })
        .collect()
}
