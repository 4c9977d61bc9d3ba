//! Domain types shared across the engine: time intervals, program metadata,
//! descriptor records and metric values, plus the program-level
//! classifications (audience slot, conflict period).

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveTime, TimeZone, Utc};
use chrono_tz::Tz;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("empty or reversed interval [{start_ms}, {end_ms})")]
    EmptyInterval { start_ms: u64, end_ms: u64 },
    #[error("unknown {kind} token {token:?}")]
    UnknownToken { kind: &'static str, token: String },
    #[error("invalid peak window {start}..{end}")]
    InvalidWindow { start: NaiveTime, end: NaiveTime },
}

/// Half-open millisecond interval `[start_ms, end_ms)` on a media timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInterval", into = "RawInterval")]
pub struct TimeInterval {
    start_ms: u64,
    end_ms: u64,
}

#[derive(Serialize, Deserialize)]
struct RawInterval {
    start_ms: u64,
    end_ms: u64,
}

impl TryFrom<RawInterval> for TimeInterval {
    type Error = ModelError;
    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        TimeInterval::new(raw.start_ms, raw.end_ms)
    }
}

impl From<TimeInterval> for RawInterval {
    fn from(iv: TimeInterval) -> Self {
        RawInterval {
            start_ms: iv.start_ms,
            end_ms: iv.end_ms,
        }
    }
}

impl TimeInterval {
    pub fn new(start_ms: u64, end_ms: u64) -> Result<Self, ModelError> {
        if start_ms < end_ms {
            Ok(Self { start_ms, end_ms })
        } else {
            Err(ModelError::EmptyInterval { start_ms, end_ms })
        }
    }

    pub fn start_ms(self) -> u64 {
        self.start_ms
    }

    pub fn end_ms(self) -> u64 {
        self.end_ms
    }

    pub fn duration_ms(self) -> u64 {
        self.end_ms - self.start_ms
    }

    /// Midpoint, rounded down to the millisecond. Always inside the interval.
    pub fn midpoint_ms(self) -> u64 {
        self.start_ms + (self.end_ms - self.start_ms) / 2
    }

    pub fn contains_ms(self, t: u64) -> bool {
        self.start_ms <= t && t < self.end_ms
    }

    pub fn contains(self, other: TimeInterval) -> bool {
        self.start_ms <= other.start_ms && other.end_ms <= self.end_ms
    }

    pub fn intersect(self, other: TimeInterval) -> Option<TimeInterval> {
        let start = self.start_ms.max(other.start_ms);
        let end = self.end_ms.min(other.end_ms);
        (start < end).then_some(TimeInterval {
            start_ms: start,
            end_ms: end,
        })
    }

    pub fn overlap_ms(self, other: TimeInterval) -> u64 {
        self.intersect(other).map_or(0, TimeInterval::duration_ms)
    }
}

impl fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.start_ms, self.end_ms)
    }
}

/// Sorts and merges overlapping or touching intervals into a disjoint union.
pub fn normalize_intervals(intervals: &[TimeInterval]) -> Vec<TimeInterval> {
    let mut sorted = intervals.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<TimeInterval> = Vec::with_capacity(sorted.len());
    for iv in sorted {
        match out.last_mut() {
            Some(last) if iv.start_ms <= last.end_ms => {
                last.end_ms = last.end_ms.max(iv.end_ms);
            }
            _ => out.push(iv),
        }
    }
    out
}

/// Removes every cut from `base`. Cuts may overlap each other or extend past
/// `base`; the result is sorted, disjoint and contained in `base`.
pub fn interval_subtract(base: TimeInterval, cuts: &[TimeInterval]) -> Vec<TimeInterval> {
    let mut out = Vec::new();
    let mut cursor = base.start_ms;
    for cut in normalize_intervals(cuts) {
        if cut.end_ms <= cursor {
            continue;
        }
        if cut.start_ms >= base.end_ms {
            break;
        }
        if cut.start_ms > cursor {
            out.push(TimeInterval {
                start_ms: cursor,
                end_ms: cut.start_ms,
            });
        }
        cursor = cursor.max(cut.end_ms);
        if cursor >= base.end_ms {
            break;
        }
    }
    if cursor < base.end_ms {
        out.push(TimeInterval {
            start_ms: cursor,
            end_ms: base.end_ms,
        });
    }
    out
}

/// Portions of `base` covered by the union of `cuts`, sorted and disjoint.
pub fn interval_intersect_all(base: TimeInterval, cuts: &[TimeInterval]) -> Vec<TimeInterval> {
    normalize_intervals(cuts)
        .into_iter()
        .filter_map(|c| c.intersect(base))
        .collect()
}

pub fn total_duration_ms(intervals: &[TimeInterval]) -> u64 {
    intervals.iter().map(|iv| iv.duration_ms()).sum()
}

macro_rules! token_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal, { $($variant:ident => $token:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token),+
                }
            }
        }

        impl FromStr for $name {
            type Err = ModelError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let t = s.trim();
                $(if t.eq_ignore_ascii_case($token) { return Ok($name::$variant); })+
                Err(ModelError::UnknownToken { kind: $kind, token: s.to_string() })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }

        impl Serialize for $name {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.token())
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let raw = <std::borrow::Cow<'de, str>>::deserialize(d)?;
                raw.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

token_enum!(Medium, "medium", { Tv => "tv", Radio => "radio" });
token_enum!(ChannelStatus, "status", { Public => "public", Private => "private" });
token_enum!(ProgramCategory, "category", {
    News => "news",
    Entertainment => "entertainment",
    MagazineDocumentary => "magazine_documentary",
    Sport => "sport",
});
token_enum!(AudienceSlot, "audience", { Low => "low", High => "high" });
token_enum!(ConflictPeriod, "conflict", { Before => "before", After => "after" });
token_enum!(
    /// Speech segmenter label. Singing voice is reported as `Music`.
    SegmentLabel, "segment label", {
    MaleSpeech => "male",
    FemaleSpeech => "female",
    Music => "music",
    Noise => "noise",
});
token_enum!(Role, "role", {
    Presenter => "presenter",
    Journalist => "journalist",
    PoliticalGuest => "political_guest",
    Expert => "expert",
    Other => "other",
});

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub program_id: String,
    pub channel_id: String,
    pub medium: Medium,
    pub status: ChannelStatus,
    pub category: ProgramCategory,
    pub start_utc: DateTime<Utc>,
    pub end_utc: DateTime<Utc>,
    pub media_id: String,
    /// Position of the program inside its media file.
    pub media_span: TimeInterval,
}

impl Program {
    pub fn duration(&self) -> Duration {
        self.end_utc - self.start_utc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeechSegment {
    pub media_id: String,
    pub span: TimeInterval,
    pub label: SegmentLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Utterance {
    pub media_id: String,
    pub span: TimeInterval,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FaceObservation {
    pub media_id: String,
    pub frame_ms: u64,
    pub height_ratio: f64,
    pub female_score: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelReport {
    pub program_id: String,
    pub role: Role,
    pub male_count: u64,
    pub female_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameRecord {
    pub name: String,
    pub total_count: u64,
    pub female_count: u64,
    pub female_prob: f64,
}

impl NameRecord {
    pub fn from_counts(name: String, male_count: u64, female_count: u64) -> Self {
        let total_count = male_count + female_count;
        NameRecord {
            name,
            total_count,
            female_count,
            female_prob: female_count as f64 / total_count as f64,
        }
    }

    pub fn male_count(&self) -> u64 {
        self.total_count - self.female_count
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum MetricKind {
    #[serde(rename = "WPR")]
    Wpr,
    #[serde(rename = "WSR")]
    Wsr,
    #[serde(rename = "WQR")]
    Wqr,
    #[serde(rename = "WFR")]
    Wfr,
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricKind::Wpr => "WPR",
            MetricKind::Wsr => "WSR",
            MetricKind::Wqr => "WQR",
            MetricKind::Wfr => "WFR",
        })
    }
}

/// A women-representation estimate kept as a ratio of two additive
/// quantities, so merging groups is exact.
///
/// `female` is the female share of `weight`: milliseconds of female speech
/// for WSR, female faces for WFR, summed female attribution probability for
/// WQR, reported women for WPR. A zero weight is the "undefined" marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub kind: MetricKind,
    pub female: f64,
    pub weight: f64,
}

impl MetricValue {
    pub fn new(kind: MetricKind, female: f64, weight: f64) -> Self {
        debug_assert!(weight >= 0.0 && female >= 0.0 && female <= weight * (1.0 + 1e-12));
        MetricValue {
            kind,
            female,
            weight,
        }
    }

    pub fn undefined(kind: MetricKind) -> Self {
        MetricValue {
            kind,
            female: 0.0,
            weight: 0.0,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.weight > 0.0
    }

    pub fn female_pct(&self) -> Option<f64> {
        self.is_defined()
            .then(|| (100.0 * self.female / self.weight).clamp(0.0, 100.0))
    }

    pub fn male_pct(&self) -> Option<f64> {
        self.female_pct().map(|p| 100.0 - p)
    }

    pub fn merge(self, other: MetricValue) -> MetricValue {
        debug_assert_eq!(self.kind, other.kind);
        MetricValue {
            kind: self.kind,
            female: self.female + other.female,
            weight: self.weight + other.weight,
        }
    }
}

/// Peak audience window in corpus-local wall-clock time, `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeakWindow {
    start: NaiveTime,
    end: NaiveTime,
}

impl PeakWindow {
    pub fn new(start: NaiveTime, end: NaiveTime) -> Result<Self, ModelError> {
        if start < end {
            Ok(PeakWindow { start, end })
        } else {
            Err(ModelError::InvalidWindow { start, end })
        }
    }

    pub fn start(&self) -> NaiveTime {
        self.start
    }

    pub fn end(&self) -> NaiveTime {
        self.end
    }
}

impl FromStr for PeakWindow {
    type Err = ModelError;
    /// Parses `HH:MM-HH:MM`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::UnknownToken {
            kind: "peak window",
            token: s.to_string(),
        };
        let (a, b) = s.trim().split_once('-').ok_or_else(bad)?;
        let start = NaiveTime::parse_from_str(a.trim(), "%H:%M").map_err(|_| bad())?;
        let end = NaiveTime::parse_from_str(b.trim(), "%H:%M").map_err(|_| bad())?;
        PeakWindow::new(start, end)
    }
}

impl fmt::Display for PeakWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start.format("%H:%M"), self.end.format("%H:%M"))
    }
}

/// Corpus wall-clock rules: timezone, peak windows per medium and the
/// conflict cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusCalendar {
    pub timezone: Tz,
    pub tv_peak: PeakWindow,
    pub radio_peak: PeakWindow,
    pub conflict_cutoff: DateTime<Utc>,
}

impl Default for CorpusCalendar {
    fn default() -> Self {
        let tz = chrono_tz::Europe::Paris;
        let hm = |h| NaiveTime::from_hms_opt(h, 0, 0).unwrap();
        CorpusCalendar {
            timezone: tz,
            tv_peak: PeakWindow::new(hm(18), hm(23)).unwrap(),
            radio_peak: PeakWindow::new(hm(6), hm(9)).unwrap(),
            conflict_cutoff: local_midnight(tz, 2023, 10, 7),
        }
    }
}

/// UTC instant of local midnight on the given date in `tz`.
pub fn local_midnight(tz: Tz, year: i32, month: u32, day: u32) -> DateTime<Utc> {
    let naive = chrono::NaiveDate::from_ymd_opt(year, month, day)
        .expect("valid date")
        .and_time(NaiveTime::MIN);
    resolve_local(tz, naive)
}

/// Maps a local wall-clock time to UTC. Ambiguous times take the earlier
/// instant; times inside a DST gap are pushed forward by the gap.
pub fn resolve_local(tz: Tz, naive: chrono::NaiveDateTime) -> DateTime<Utc> {
    let mut probe = naive;
    for _ in 0..4 {
        if let Some(dt) = tz.from_local_datetime(&probe).earliest() {
            return dt.with_timezone(&Utc);
        }
        probe += Duration::minutes(30);
    }
    Utc.from_utc_datetime(&naive)
}

impl CorpusCalendar {
    pub fn peak_window(&self, medium: Medium) -> PeakWindow {
        match medium {
            Medium::Tv => self.tv_peak,
            Medium::Radio => self.radio_peak,
        }
    }

    /// Milliseconds of `[start, end)` falling inside the medium's daily peak window.
    pub fn peak_overlap_ms(&self, medium: Medium, start: DateTime<Utc>, end: DateTime<Utc>) -> i64 {
        let window = self.peak_window(medium);
        let first = start.with_timezone(&self.timezone).date_naive().pred_opt().unwrap();
        let last = end.with_timezone(&self.timezone).date_naive();
        let mut total = 0i64;
        let mut day = first;
        while day <= last {
            let ws = resolve_local(self.timezone, day.and_time(window.start));
            let we = resolve_local(self.timezone, day.and_time(window.end));
            let s = ws.max(start);
            let e = we.min(end);
            if s < e {
                total += (e - s).num_milliseconds();
            }
            day = day.succ_opt().unwrap();
        }
        total
    }

    /// High iff at least half of the program overlaps its medium's peak window.
    pub fn classify_audience(&self, program: &Program) -> AudienceSlot {
        let duration = (program.end_utc - program.start_utc).num_milliseconds();
        let overlap = self.peak_overlap_ms(program.medium, program.start_utc, program.end_utc);
        if 2 * overlap >= duration {
            AudienceSlot::High
        } else {
            AudienceSlot::Low
        }
    }

    pub fn classify_conflict_period(&self, program: &Program) -> ConflictPeriod {
        classify_conflict_period(program, self.conflict_cutoff)
    }
}

pub fn classify_conflict_period(program: &Program, cutoff_utc: DateTime<Utc>) -> ConflictPeriod {
    if program.start_utc >= cutoff_utc {
        ConflictPeriod::After
    } else {
        ConflictPeriod::Before
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn iv(a: u64, b: u64) -> TimeInterval {
        TimeInterval::new(a, b).unwrap()
    }

    fn local(y: i32, m: u32, d: u32, h: u32, min: u32) -> DateTime<Utc> {
        let naive = NaiveDate::from_ymd_opt(y, m, d)
            .unwrap()
            .and_hms_opt(h, min, 0)
            .unwrap();
        resolve_local(chrono_tz::Europe::Paris, naive)
    }

    fn program(medium: Medium, start: DateTime<Utc>, end: DateTime<Utc>) -> Program {
        let ms = (end - start).num_milliseconds() as u64;
        Program {
            program_id: "p".into(),
            channel_id: "c".into(),
            medium,
            status: ChannelStatus::Public,
            category: ProgramCategory::News,
            start_utc: start,
            end_utc: end,
            media_id: "m".into(),
            media_span: iv(0, ms),
        }
    }

    #[test]
    fn empty_interval_rejected() {
        assert!(TimeInterval::new(5, 5).is_err());
        assert!(TimeInterval::new(6, 5).is_err());
    }

    #[test]
    fn subtract_examples() {
        assert_eq!(
            interval_subtract(iv(0, 100_000), &[iv(10_000, 20_000)]),
            vec![iv(0, 10_000), iv(20_000, 100_000)]
        );
        assert_eq!(interval_subtract(iv(0, 100_000), &[]), vec![iv(0, 100_000)]);
        assert!(interval_subtract(iv(0, 60_000), &[iv(0, 60_000)]).is_empty());
    }

    #[test]
    fn subtract_overlapping_and_outside_cuts() {
        let cuts = [iv(50, 70), iv(0, 5), iv(60, 80), iv(200, 300), iv(95, 150)];
        assert_eq!(
            interval_subtract(iv(10, 100), &cuts),
            vec![iv(10, 50), iv(80, 95)]
        );
        assert_eq!(
            interval_intersect_all(iv(10, 100), &cuts),
            vec![iv(50, 80), iv(95, 100)]
        );
    }

    #[test]
    fn audience_examples() {
        let cal = CorpusCalendar::default();
        let tv = program(Medium::Tv, local(2023, 5, 10, 19, 0), local(2023, 5, 10, 20, 0));
        assert_eq!(cal.classify_audience(&tv), AudienceSlot::High);
        let radio = program(Medium::Radio, local(2023, 5, 10, 7, 0), local(2023, 5, 10, 8, 0));
        assert_eq!(cal.classify_audience(&radio), AudienceSlot::High);
        let tie = program(Medium::Tv, local(2023, 5, 10, 17, 30), local(2023, 5, 10, 18, 30));
        assert_eq!(
            cal.peak_overlap_ms(Medium::Tv, tie.start_utc, tie.end_utc),
            30 * 60 * 1000
        );
        assert_eq!(cal.classify_audience(&tie), AudienceSlot::High);
        let low = program(Medium::Tv, local(2023, 5, 10, 17, 0), local(2023, 5, 10, 18, 29));
        assert_eq!(cal.classify_audience(&low), AudienceSlot::Low);
        // Radio at TV peak hours is low audience.
        let radio_evening = program(Medium::Radio, local(2023, 5, 10, 19, 0), local(2023, 5, 10, 20, 0));
        assert_eq!(cal.classify_audience(&radio_evening), AudienceSlot::Low);
    }

    #[test]
    fn audience_across_midnight_and_dst() {
        let cal = CorpusCalendar::default();
        // 22:30 to 01:30 overlaps the TV window for 30 minutes only.
        let late = program(Medium::Tv, local(2023, 10, 28, 22, 30), local(2023, 10, 29, 1, 30));
        assert_eq!(
            cal.peak_overlap_ms(Medium::Tv, late.start_utc, late.end_utc),
            30 * 60 * 1000
        );
        assert_eq!(cal.classify_audience(&late), AudienceSlot::Low);
        // The day after the October DST switch, 18:00 local is 17:00 UTC.
        let after = program(Medium::Tv, local(2023, 10, 30, 18, 0), local(2023, 10, 30, 19, 0));
        assert_eq!(after.start_utc.format("%H:%M").to_string(), "17:00");
        assert_eq!(cal.classify_audience(&after), AudienceSlot::High);
    }

    #[test]
    fn conflict_examples() {
        let cal = CorpusCalendar::default();
        let mk = |s| program(Medium::Tv, s, s + Duration::hours(1));
        assert_eq!(
            cal.classify_conflict_period(&mk(local(2023, 10, 6, 23, 0))),
            ConflictPeriod::Before
        );
        assert_eq!(
            cal.classify_conflict_period(&mk(local(2023, 10, 7, 0, 0))),
            ConflictPeriod::After
        );
        assert_eq!(
            cal.classify_conflict_period(&mk(local(2023, 5, 15, 12, 0))),
            ConflictPeriod::Before
        );
    }

    #[test]
    fn peak_window_parse() {
        let w: PeakWindow = "06:00-09:00".parse().unwrap();
        assert_eq!(w.to_string(), "06:00-09:00");
        assert!("09:00-06:00".parse::<PeakWindow>().is_err());
        assert!("nope".parse::<PeakWindow>().is_err());
    }

    #[test]
    fn metric_value_undefined_and_merge() {
        let u = MetricValue::undefined(MetricKind::Wsr);
        assert_eq!(u.female_pct(), None);
        let a = MetricValue::new(MetricKind::Wsr, 10.0, 10.0);
        let b = MetricValue::new(MetricKind::Wsr, 0.0, 90.0);
        assert_eq!(a.merge(b).female_pct(), Some(10.0));
        assert_eq!(a.merge(u), a);
        assert_eq!(a.merge(b).male_pct(), Some(90.0));
    }

    #[test]
    fn tokens_round_trip() {
        for c in ProgramCategory::ALL {
            assert_eq!(c.token().parse::<ProgramCategory>().unwrap(), *c);
        }
        assert_eq!("NEWS".parse::<ProgramCategory>().unwrap(), ProgramCategory::News);
        assert!("anchor".parse::<Role>().is_err());
    }

    fn arb_intervals() -> impl Strategy<Value = (TimeInterval, Vec<TimeInterval>)> {
        let base = (0u64..1000, 1u64..1000).prop_map(|(s, d)| iv(s, s + d));
        let cut = (0u64..2200, 1u64..400).prop_map(|(s, d)| iv(s, s + d));
        (base, prop::collection::vec(cut, 0..12))
    }

    proptest! {
        #[test]
        fn subtract_conserves_duration((base, cuts) in arb_intervals()) {
            let out = interval_subtract(base, &cuts);
            let removed = total_duration_ms(&interval_intersect_all(base, &cuts));
            prop_assert_eq!(base.duration_ms(), total_duration_ms(&out) + removed);
            for w in out.windows(2) {
                prop_assert!(w[0].end_ms() < w[1].start_ms());
            }
            for r in &out {
                prop_assert!(base.contains(*r));
                for c in &cuts {
                    prop_assert_eq!(r.overlap_ms(*c), 0);
                }
            }
        }

        #[test]
        fn audience_halves_agree_implies_whole(start_min in 0i64..(3 * 24 * 60), d1 in 1i64..240, d2 in 1i64..240, radio in any::<bool>()) {
            let cal = CorpusCalendar::default();
            let medium = if radio { Medium::Radio } else { Medium::Tv };
            let t0 = local(2023, 5, 2, 0, 0) + Duration::minutes(start_min);
            let t1 = t0 + Duration::minutes(d1);
            let t2 = t1 + Duration::minutes(d2);
            let a = cal.classify_audience(&program(medium, t0, t1));
            let b = cal.classify_audience(&program(medium, t1, t2));
            if a == b {
                prop_assert_eq!(cal.classify_audience(&program(medium, t0, t2)), a);
            }
        }

        #[test]
        fn female_pct_in_range(f in 0.0f64..1e6, extra in 0.0f64..1e6) {
            let m = MetricValue::new(MetricKind::Wqr, f, f + extra);
            if let Some(p) = m.female_pct() {
                prop_assert!((0.0..=100.0).contains(&p));
            }
        }
    }
}
