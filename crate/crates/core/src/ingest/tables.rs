//! Comma-separated schedule, channel report and commercial-break tables.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};

use super::{check_header, line_of, IngestError};
use crate::model::{ChannelReport, ModelError, Program, Role, TimeInterval};

pub const PROGRAM_COLUMNS: [&str; 10] = [
    "program_id",
    "channel_id",
    "medium",
    "status",
    "category",
    "start_utc",
    "end_utc",
    "media_id",
    "media_start_ms",
    "media_end_ms",
];
pub const REPORT_COLUMNS: [&str; 4] = ["program_id", "role", "male_count", "female_count"];
pub const BREAK_COLUMNS: [&str; 3] = ["media_id", "start_ms", "end_ms"];

/// Maximum allowed gap between the wall-clock duration of a program and the
/// length of its media span.
pub const MEDIA_SPAN_TOLERANCE_MS: i64 = 1000;

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(source)
}

fn arity(record: &csv::StringRecord, expected: usize) -> Result<(), IngestError> {
    if record.len() == expected {
        Ok(())
    } else {
        Err(IngestError::MalformedRecord {
            line: line_of(record),
            reason: format!("expected {expected} fields, found {}", record.len()),
        })
    }
}

fn enum_field<T: std::str::FromStr<Err = ModelError>>(
    record: &csv::StringRecord,
    idx: usize,
    field: &'static str,
) -> Result<T, IngestError> {
    record[idx].parse().map_err(|_| IngestError::InvalidEnum {
        line: line_of(record),
        field,
        value: record[idx].to_string(),
    })
}

fn int_field(record: &csv::StringRecord, idx: usize, field: &'static str) -> Result<u64, IngestError> {
    record[idx].trim().parse().map_err(|_| IngestError::MalformedRecord {
        line: line_of(record),
        reason: format!("{field}: expected a non-negative integer, found {:?}", &record[idx]),
    })
}

fn time_field(record: &csv::StringRecord, idx: usize, field: &'static str) -> Result<DateTime<Utc>, IngestError> {
    DateTime::parse_from_rfc3339(record[idx].trim())
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| IngestError::MalformedRecord {
            line: line_of(record),
            reason: format!("{field}: {e}"),
        })
}

fn id_field(record: &csv::StringRecord, idx: usize, field: &'static str) -> Result<String, IngestError> {
    let v = record[idx].trim();
    if v.is_empty() {
        return Err(IngestError::MalformedRecord {
            line: line_of(record),
            reason: format!("{field} is empty"),
        });
    }
    Ok(v.to_string())
}

pub fn format_utc(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

pub fn parse_programs<R: Read>(source: R) -> Result<BTreeMap<String, Program>, IngestError> {
    let mut rdr = reader(source);
    check_header(&mut rdr, &PROGRAM_COLUMNS)?;
    let mut programs = BTreeMap::new();
    for result in rdr.records() {
        let rec = result?;
        arity(&rec, PROGRAM_COLUMNS.len())?;
        let line = line_of(&rec);
        let program_id = id_field(&rec, 0, "program_id")?;
        let start_utc = time_field(&rec, 5, "start_utc")?;
        let end_utc = time_field(&rec, 6, "end_utc")?;
        if end_utc <= start_utc {
            return Err(IngestError::NonMonotoneTimes { line });
        }
        let media_start = int_field(&rec, 8, "media_start_ms")?;
        let media_end = int_field(&rec, 9, "media_end_ms")?;
        let media_span =
            TimeInterval::new(media_start, media_end).map_err(|_| IngestError::NonMonotoneTimes { line })?;
        let wall_ms = (end_utc - start_utc).num_milliseconds();
        if (media_span.duration_ms() as i64 - wall_ms).abs() > MEDIA_SPAN_TOLERANCE_MS {
            return Err(IngestError::MediaSpanMismatch {
                line,
                media_ms: media_span.duration_ms(),
                wall_ms,
            });
        }
        let program = Program {
            program_id: program_id.clone(),
            channel_id: id_field(&rec, 1, "channel_id")?,
            medium: enum_field(&rec, 2, "medium")?,
            status: enum_field(&rec, 3, "status")?,
            category: enum_field(&rec, 4, "category")?,
            start_utc,
            end_utc,
            media_id: id_field(&rec, 7, "media_id")?,
            media_span,
        };
        if programs.insert(program_id.clone(), program).is_some() {
            return Err(IngestError::DuplicateProgramId { line, program_id });
        }
    }
    Ok(programs)
}

pub fn write_programs<'a, W, I>(out: W, programs: I) -> Result<(), IngestError>
where
    W: Write,
    I: IntoIterator<Item = &'a Program>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PROGRAM_COLUMNS)?;
    for p in programs {
        w.write_record([
            p.program_id.as_str(),
            p.channel_id.as_str(),
            p.medium.token(),
            p.status.token(),
            p.category.token(),
            &format_utc(p.start_utc),
            &format_utc(p.end_utc),
            p.media_id.as_str(),
            &p.media_span.start_ms().to_string(),
            &p.media_span.end_ms().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn parse_reports<R: Read>(source: R) -> Result<Vec<ChannelReport>, IngestError> {
    let mut rdr = reader(source);
    check_header(&mut rdr, &REPORT_COLUMNS)?;
    let mut seen: BTreeSet<(String, Role)> = BTreeSet::new();
    let mut reports = Vec::new();
    for result in rdr.records() {
        let rec = result?;
        arity(&rec, REPORT_COLUMNS.len())?;
        let line = line_of(&rec);
        let report = ChannelReport {
            program_id: id_field(&rec, 0, "program_id")?,
            role: enum_field(&rec, 1, "role")?,
            male_count: int_field(&rec, 2, "male_count")?,
            female_count: int_field(&rec, 3, "female_count")?,
        };
        if !seen.insert((report.program_id.clone(), report.role)) {
            return Err(IngestError::DuplicateReport {
                line,
                program_id: report.program_id,
                role: report.role,
            });
        }
        reports.push(report);
    }
    Ok(reports)
}

pub fn write_reports<W: Write>(out: W, reports: &[ChannelReport]) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_COLUMNS)?;
    for r in reports {
        w.write_record([
            r.program_id.as_str(),
            r.role.token(),
            &r.male_count.to_string(),
            &r.female_count.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Commercial breaks per media, sorted by start.
pub fn parse_breaks<R: Read>(source: R) -> Result<BTreeMap<String, Vec<TimeInterval>>, IngestError> {
    let mut rdr = reader(source);
    check_header(&mut rdr, &BREAK_COLUMNS)?;
    let mut breaks: BTreeMap<String, Vec<TimeInterval>> = BTreeMap::new();
    for result in rdr.records() {
        let rec = result?;
        arity(&rec, BREAK_COLUMNS.len())?;
        let line = line_of(&rec);
        let media_id = id_field(&rec, 0, "media_id")?;
        let span = TimeInterval::new(int_field(&rec, 1, "start_ms")?, int_field(&rec, 2, "end_ms")?)
            .map_err(|_| IngestError::NonMonotoneTimes { line })?;
        breaks.entry(media_id).or_default().push(span);
    }
    for list in breaks.values_mut() {
        list.sort();
    }
    Ok(breaks)
}

pub fn write_breaks<W: Write>(out: W, breaks: &BTreeMap<String, Vec<TimeInterval>>) -> Result<(), IngestError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BREAK_COLUMNS)?;
    for (media_id, list) in breaks {
        for b in list {
            w.write_record([media_id.as_str(), &b.start_ms().to_string(), &b.end_ms().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}
