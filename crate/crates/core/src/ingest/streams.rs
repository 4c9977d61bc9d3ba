//! Newline-delimited JSON descriptor streams: speech segments, utterances
//! and face observations.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::model::{FaceObservation, SegmentLabel, SpeechSegment, TimeInterval, Utterance};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    media_id: String,
    start_ms: u64,
    end_ms: u64,
    label: SegmentLabel,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UtteranceRecord {
    media_id: String,
    start_ms: u64,
    end_ms: u64,
    text: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceRecord {
    media_id: String,
    frame_ms: u64,
    height_ratio: f64,
    female_score: f64,
}

/// Deserializes each non-blank line, tagging errors with the 1-based line.
fn read_jsonl<R: Read, T: DeserializeOwned>(
    source: R,
    mut each: impl FnMut(u64, T) -> Result<(), IngestError>,
) -> Result<(), IngestError> {
    for (idx, line) in BufReader::new(source).lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: T = serde_json::from_str(&line).map_err(|e| IngestError::SchemaViolation {
            line: line_no,
            reason: e.to_string(),
        })?;
        each(line_no, rec)?;
    }
    Ok(())
}

fn span(line: u64, start_ms: u64, end_ms: u64) -> Result<TimeInterval, IngestError> {
    TimeInterval::new(start_ms, end_ms).map_err(|e| IngestError::SchemaViolation {
        line,
        reason: e.to_string(),
    })
}

/// Speech segments per media, sorted by start. Overlap within a media is an error.
pub fn parse_segments<R: Read>(source: R) -> Result<BTreeMap<String, Vec<SpeechSegment>>, IngestError> {
    let mut by_media: BTreeMap<String, Vec<(u64, SpeechSegment)>> = BTreeMap::new();
    read_jsonl(source, |line, rec: SegmentRecord| {
        let seg = SpeechSegment {
            span: span(line, rec.start_ms, rec.end_ms)?,
            media_id: rec.media_id,
            label: rec.label,
        };
        by_media.entry(seg.media_id.clone()).or_default().push((line, seg));
        Ok(())
    })?;
    let mut out = BTreeMap::new();
    for (media_id, mut list) in by_media {
        list.sort_by_key(|(_, s)| s.span);
        for pair in list.windows(2) {
            if pair[1].1.span.start_ms() < pair[0].1.span.end_ms() {
                return Err(IngestError::OverlappingSegments {
                    media_id,
                    line: pair[0].0.max(pair[1].0),
                });
            }
        }
        out.insert(media_id, list.into_iter().map(|(_, s)| s).collect());
    }
    Ok(out)
}

pub fn parse_utterances<R: Read>(source: R) -> Result<BTreeMap<String, Vec<Utterance>>, IngestError> {
    let mut by_media: BTreeMap<String, Vec<Utterance>> = BTreeMap::new();
    read_jsonl(source, |line, rec: UtteranceRecord| {
        if rec.text.trim().is_empty() {
            return Err(IngestError::SchemaViolation {
                line,
                reason: "utterance text is empty".into(),
            });
        }
        let utt = Utterance {
            span: span(line, rec.start_ms, rec.end_ms)?,
            media_id: rec.media_id,
            text: rec.text,
        };
        by_media.entry(utt.media_id.clone()).or_default().push(utt);
        Ok(())
    })?;
    for list in by_media.values_mut() {
        list.sort_by_key(|u| u.span);
    }
    Ok(by_media)
}

pub fn parse_faces<R: Read>(source: R) -> Result<BTreeMap<String, Vec<FaceObservation>>, IngestError> {
    let mut by_media: BTreeMap<String, Vec<FaceObservation>> = BTreeMap::new();
    read_jsonl(source, |line, rec: FaceRecord| {
        if !(rec.height_ratio > 0.0 && rec.height_ratio <= 1.0) {
            return Err(IngestError::SchemaViolation {
                line,
                reason: format!("height_ratio {} outside (0, 1]", rec.height_ratio),
            });
        }
        if !(0.0..=1.0).contains(&rec.female_score) {
            return Err(IngestError::SchemaViolation {
                line,
                reason: format!("female_score {} outside [0, 1]", rec.female_score),
            });
        }
        by_media.entry(rec.media_id.clone()).or_default().push(FaceObservation {
            media_id: rec.media_id,
            frame_ms: rec.frame_ms,
            height_ratio: rec.height_ratio,
            female_score: rec.female_score,
        });
        Ok(())
    })?;
    for list in by_media.values_mut() {
        // Stable: faces of one frame keep their file order.
        list.sort_by_key(|f| f.frame_ms);
    }
    Ok(by_media)
}

fn write_line<W: Write, T: Serialize>(out: &mut W, rec: &T) -> Result<(), IngestError> {
    serde_json::to_writer(&mut *out, rec).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn write_segments<W: Write>(mut out: W, segments: &BTreeMap<String, Vec<SpeechSegment>>) -> Result<(), IngestError> {
    for s in segments.values().flatten() {
        write_line(
            &mut out,
            &SegmentRecord {
                media_id: s.media_id.clone(),
                start_ms: s.span.start_ms(),
                end_ms: s.span.end_ms(),
                label: s.label,
            },
        )?;
    }
    Ok(())
}

pub fn write_utterances<W: Write>(mut out: W, utterances: &BTreeMap<String, Vec<Utterance>>) -> Result<(), IngestError> {
    for u in utterances.values().flatten() {
        write_line(
            &mut out,
            &UtteranceRecord {
                media_id: u.media_id.clone(),
                start_ms: u.span.start_ms(),
                end_ms: u.span.end_ms(),
                text: u.text.clone(),
            },
        )?;
    }
    Ok(())
}

pub fn write_faces<W: Write>(mut out: W, faces: &BTreeMap<String, Vec<FaceObservation>>) -> Result<(), IngestError> {
    for f in faces.values().flatten() {
        write_line(
            &mut out,
            &FaceRecord {
                media_id: f.media_id.clone(),
                frame_ms: f.frame_ms,
                height_ratio: f.height_ratio,
                female_score: f.female_score,
            },
        )?;
    }
    Ok(())
}
