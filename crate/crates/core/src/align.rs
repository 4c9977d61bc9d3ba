//! Fuses transcribed utterances with speaker-gender segments and selects
//! the utterance population used for effect modelling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::CorpusBundle;
use crate::metrics::{effective_spans, SpanMode};
use crate::model::{CorpusCalendar, SegmentLabel, SpeechSegment, TimeInterval, Utterance};
use crate::namex::CorpusNameStats;
use crate::stats::{AnalysisRow, Factor};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("segment media {segment:?} does not match utterance media {utterance:?}")]
    MediaMismatch { utterance: String, segment: String },
    #[error("no gendered speech overlaps the utterance")]
    UndefinedRatio,
}

/// Per-label durations partitioning one utterance span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtteranceAlignment {
    pub span: TimeInterval,
    pub male_ms: u64,
    pub female_ms: u64,
    pub music_ms: u64,
    pub noise_ms: u64,
    pub unlabeled_ms: u64,
}

impl UtteranceAlignment {
    pub fn speech_ms(&self) -> u64 {
        self.male_ms + self.female_ms
    }

    /// Share of the span covered by male or female speech.
    pub fn vad_ratio(&self) -> f64 {
        self.speech_ms() as f64 / self.span.duration_ms() as f64
    }

    /// Share of gendered speech that is female; `None` without gendered speech.
    pub fn female_speech_ratio(&self) -> Option<f64> {
        let speech = self.speech_ms();
        (speech > 0).then(|| self.female_ms as f64 / speech as f64)
    }
}

/// Overlap of `utterance` with each segment label. `segments` must be sorted
/// and non-overlapping, all on the utterance's media.
pub fn align_utterance(utterance: &Utterance, segments: &[SpeechSegment]) -> Result<UtteranceAlignment, AlignError> {
    let span = utterance.span;
    let mut a = UtteranceAlignment {
        span,
        male_ms: 0,
        female_ms: 0,
        music_ms: 0,
        noise_ms: 0,
        unlabeled_ms: 0,
    };
    let first = segments.partition_point(|s| s.span.end_ms() <= span.start_ms());
    for seg in &segments[first..] {
        if seg.span.start_ms() >= span.end_ms() {
            break;
        }
        if seg.media_id != utterance.media_id {
            return Err(AlignError::MediaMismatch {
                utterance: utterance.media_id.clone(),
                segment: seg.media_id.clone(),
            });
        }
        let ms = seg.span.overlap_ms(span);
        match seg.label {
            SegmentLabel::MaleSpeech => a.male_ms += ms,
            SegmentLabel::FemaleSpeech => a.female_ms += ms,
            SegmentLabel::Music => a.music_ms += ms,
            SegmentLabel::Noise => a.noise_ms += ms,
        }
    }
    a.unlabeled_ms = span.duration_ms() - a.male_ms - a.female_ms - a.music_ms - a.noise_ms;
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpeakerGenderClass {
    MostlyMale,
    MostlyFemale,
    Ambiguous,
}

impl SpeakerGenderClass {
    /// Level label used in analysis rows.
    pub fn level(self) -> Option<&'static str> {
        match self {
            SpeakerGenderClass::MostlyMale => Some("male"),
            SpeakerGenderClass::MostlyFemale => Some("female"),
            SpeakerGenderClass::Ambiguous => None,
        }
    }
}

/// Population filter thresholds. Gender bounds are strict, the VAD bound inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlignThresholds {
    pub min_vad_ratio: f64,
    pub male_below: f64,
    pub female_above: f64,
}

impl Default for AlignThresholds {
    fn default() -> Self {
        AlignThresholds {
            min_vad_ratio: 0.50,
            male_below: 0.20,
            female_above: 0.80,
        }
    }
}

pub fn classify_speaker_gender(
    alignment: &UtteranceAlignment,
    thresholds: &AlignThresholds,
) -> Result<SpeakerGenderClass, AlignError> {
    let ratio = alignment.female_speech_ratio().ok_or(AlignError::UndefinedRatio)?;
    Ok(if ratio < thresholds.male_below {
        SpeakerGenderClass::MostlyMale
    } else if ratio > thresholds.female_above {
        SpeakerGenderClass::MostlyFemale
    } else {
        SpeakerGenderClass::Ambiguous
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationConfig {
    pub thresholds: AlignThresholds,
    pub calendar: CorpusCalendar,
    /// Which part of each program utterances are drawn from, by midpoint.
    pub mode: SpanMode,
    /// Weight rows by their hit count instead of one per utterance.
    pub weight_by_hits: bool,
}

impl Default for PopulationConfig {
    fn default() -> Self {
        PopulationConfig {
            thresholds: AlignThresholds::default(),
            calendar: CorpusCalendar::default(),
            mode: SpanMode::ExcludeBreaks,
            weight_by_hits: false,
        }
    }
}

/// Builds the analysis rows: utterances with at least one first name,
/// enough voice activity and an unambiguous speaker gender. Rows are ordered
/// by program id, then utterance start.
pub fn select_stats_population(
    bundle: &CorpusBundle,
    name_stats: &CorpusNameStats,
    config: &PopulationConfig,
) -> Result<Vec<AnalysisRow>, AlignError> {
    let mut keyed: Vec<((&str, TimeInterval), AnalysisRow)> = Vec::new();
    let no_segments: Vec<SpeechSegment> = Vec::new();
    for program in bundle.programs.values() {
        let Some(utterances) = bundle.utterances.get(&program.media_id) else {
            continue;
        };
        let Some(stats) = name_stats.get(&program.media_id) else {
            continue;
        };
        let breaks = bundle.breaks.get(&program.media_id).map_or(&[][..], Vec::as_slice);
        let spans = effective_spans(program, breaks, config.mode);
        let segments = bundle.segments.get(&program.media_id).unwrap_or(&no_segments);
        let slot = config.calendar.classify_audience(program);
        let period = config.calendar.classify_conflict_period(program);
        for (utt, stat) in utterances.iter().zip(stats) {
            let Some(stat) = stat else { continue };
            let Some(y) = stat.mean_female_prob() else { continue };
            let mid = utt.span.midpoint_ms();
            if !spans.iter().any(|s| s.contains_ms(mid)) {
                continue;
            }
            let alignment = align_utterance(utt, segments)?;
            if alignment.vad_ratio() < config.thresholds.min_vad_ratio {
                continue;
            }
            let Ok(class) = classify_speaker_gender(&alignment, &config.thresholds) else {
                continue;
            };
            let Some(gender) = class.level() else { continue };
            let mut levels: [String; 7] = Default::default();
            levels[Factor::Medium.index()] = program.medium.token().into();
            levels[Factor::Channel.index()] = program.channel_id.clone();
            levels[Factor::Status.index()] = program.status.token().into();
            levels[Factor::Category.index()] = program.category.token().into();
            levels[Factor::Audience.index()] = slot.token().into();
            levels[Factor::Conflict.index()] = period.token().into();
            levels[Factor::SpeakerGender.index()] = gender.into();
            let weight = if config.weight_by_hits {
                stat.hits.len() as f64
            } else {
                1.0
            };
            keyed.push(((program.program_id.as_str(), utt.span), AnalysisRow { y, weight, levels }));
        }
    }
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(keyed.into_iter().map(|(_, row)| row).collect())
}

/// Alignments of every utterance, per media, in utterance order.
pub fn align_corpus(bundle: &CorpusBundle) -> Result<BTreeMap<String, Vec<UtteranceAlignment>>, AlignError> {
    let empty = Vec::new();
    bundle
        .utterances
        .iter()
        .map(|(media, utts)| {
            let segs = bundle.segments.get(media).unwrap_or(&empty);
            let aligned = utts.iter().map(|u| align_utterance(u, segs)).collect::<Result<Vec<_>, _>>()?;
            Ok((media.clone(), aligned))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(a: u64, b: u64) -> TimeInterval {
        TimeInterval::new(a, b).unwrap()
    }

    fn utt(a: u64, b: u64) -> Utterance {
        Utterance {
            media_id: "m".into(),
            span: iv(a, b),
            text: "x".into(),
        }
    }

    fn seg(a: u64, b: u64, label: SegmentLabel) -> SpeechSegment {
        SpeechSegment {
            media_id: "m".into(),
            span: iv(a, b),
            label,
        }
    }

    #[test]
    fn full_female_cover() {
        let a = align_utterance(&utt(0, 10_000), &[seg(0, 10_000, SegmentLabel::FemaleSpeech)]).unwrap();
        assert_eq!(a.female_ms, 10_000);
        assert_eq!(a.vad_ratio(), 1.0);
        assert_eq!(a.female_speech_ratio(), Some(1.0));
    }

    #[test]
    fn male_then_music() {
        let segs = [seg(0, 4000, SegmentLabel::MaleSpeech), seg(4000, 10_000, SegmentLabel::Music)];
        let a = align_utterance(&utt(0, 10_000), &segs).unwrap();
        assert_eq!((a.male_ms, a.music_ms, a.unlabeled_ms), (4000, 6000, 0));
        assert!((a.vad_ratio() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn no_segments() {
        let a = align_utterance(&utt(0, 10_000), &[]).unwrap();
        assert_eq!(a.unlabeled_ms, 10_000);
        assert_eq!(a.female_speech_ratio(), None);
        assert_eq!(
            classify_speaker_gender(&a, &AlignThresholds::default()),
            Err(AlignError::UndefinedRatio)
        );
    }

    #[test]
    fn media_mismatch() {
        let mut s = seg(0, 5000, SegmentLabel::MaleSpeech);
        s.media_id = "other".into();
        assert!(matches!(
            align_utterance(&utt(0, 1000), &[s]),
            Err(AlignError::MediaMismatch { .. })
        ));
    }

    fn with_ratio(female_ms: u64, male_ms: u64) -> UtteranceAlignment {
        UtteranceAlignment {
            span: iv(0, female_ms + male_ms),
            male_ms,
            female_ms,
            music_ms: 0,
            noise_ms: 0,
            unlabeled_ms: 0,
        }
    }

    #[test]
    fn gender_classes() {
        let t = AlignThresholds::default();
        assert_eq!(classify_speaker_gender(&with_ratio(9, 1), &t), Ok(SpeakerGenderClass::MostlyFemale));
        assert_eq!(classify_speaker_gender(&with_ratio(5, 5), &t), Ok(SpeakerGenderClass::Ambiguous));
        assert_eq!(classify_speaker_gender(&with_ratio(1, 4), &t), Ok(SpeakerGenderClass::Ambiguous));
        assert_eq!(classify_speaker_gender(&with_ratio(4, 1), &t), Ok(SpeakerGenderClass::Ambiguous));
        assert_eq!(classify_speaker_gender(&with_ratio(1, 9), &t), Ok(SpeakerGenderClass::MostlyMale));
    }

    fn arb_layout() -> impl Strategy<Value = (Vec<SpeechSegment>, Utterance)> {
        let pieces = prop::collection::vec((0u64..300, 1u64..500, 0usize..4), 0..20);
        (pieces, 0u64..3000, 1u64..3000).prop_map(|(pieces, us, ud)| {
            let mut t = 0;
            let mut segs = Vec::new();
            for (gap, len, label) in pieces {
                t += gap;
                segs.push(seg(t, t + len, SegmentLabel::ALL[label]));
                t += len;
            }
            (segs, utt(us, us + ud))
        })
    }

    proptest! {
        #[test]
        fn partition_is_exact((segs, u) in arb_layout()) {
            let a = align_utterance(&u, &segs).unwrap();
            prop_assert_eq!(a.male_ms + a.female_ms + a.music_ms + a.noise_ms + a.unlabeled_ms, u.span.duration_ms());
            prop_assert!((0.0..=1.0).contains(&a.vad_ratio()));
        }

        #[test]
        fn splitting_segments_is_invisible((segs, u) in arb_layout(), cut in 0.0f64..1.0) {
            let mut split = Vec::new();
            for s in &segs {
                let mid = s.span.start_ms() + ((s.span.duration_ms() as f64) * cut) as u64;
                if mid > s.span.start_ms() && mid < s.span.end_ms() {
                    split.push(seg(s.span.start_ms(), mid, s.label));
                    split.push(seg(mid, s.span.end_ms(), s.label));
                } else {
                    split.push(s.clone());
                }
            }
            prop_assert_eq!(align_utterance(&u, &segs).unwrap(), align_utterance(&u, &split).unwrap());
        }
    }
}
