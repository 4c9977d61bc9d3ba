//! Report tables: construction from aggregates and population rows, and
//! rendering as delimited text, JSON and aligned plain text.
//!
//! Percentages are rounded half away from zero to one decimal. Undefined
//! cells render as `-`.

use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ingest::CorpusBundle;
use crate::metrics::{aggregate, Dimension, GroupKey, GroupResult, Grouping, Metrics, MetricsConfig, ProgramFilter, SpanMode};
use crate::model::{
    AudienceSlot, ChannelStatus, ConflictPeriod, Medium, MetricKind, MetricValue, ModelError, ProgramCategory,
};
use crate::namex::CorpusNameStats;
use crate::stats::{group_means, AnalysisRow, EffectReport, Factor};

pub const UNDEFINED_CELL: &str = "-";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableId {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
}

impl TableId {
    pub const ALL: [TableId; 6] = [
        TableId::Table1,
        TableId::Table2,
        TableId::Table3,
        TableId::Table4,
        TableId::Table5,
        TableId::Table6,
    ];

    pub fn token(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
            TableId::Table4 => "table4",
            TableId::Table5 => "table5",
            TableId::Table6 => "table6",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TableId::Table1 => "Automatic women presence percentage in TV programs and in-show advertisements",
            TableId::Table2 => "Women (%) in high and low audience programs",
            TableId::Table3 => "Women (%) in public and private channels",
            TableId::Table4 => "TV women presence percentage per program type",
            TableId::Table5 => "Women presence difference (%) in news programs after the conflict cutoff",
            TableId::Table6 => "Women first name % depending on speaker gender, medium and audience time-slot",
        }
    }

    /// Whether the table is built from the statistics population.
    pub fn needs_population(self) -> bool {
        self == TableId::Table6
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for TableId {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        TableId::ALL
            .into_iter()
            .find(|id| id.token() == t)
            .ok_or(ModelError::UnknownToken {
                kind: "table template",
                token: s.to_string(),
            })
    }
}

/// Rounds half away from zero to one decimal and formats it. Negative values
/// that round to zero print as `0.0`.
pub fn format_one_decimal(v: f64) -> String {
    let r = (v * 10.0).round() / 10.0;
    if r == 0.0 {
        "0.0".into()
    } else {
        format!("{r:.1}")
    }
}

pub fn format_pct(v: Option<f64>) -> String {
    v.map_or_else(|| UNDEFINED_CELL.to_string(), format_one_decimal)
}

/// Like [`format_pct`] with an explicit `+` on positive values.
pub fn format_signed_pct(v: Option<f64>) -> String {
    match v {
        None => UNDEFINED_CELL.to_string(),
        Some(x) => {
            let s = format_one_decimal(x);
            if s != "0.0" && !s.starts_with('-') {
                format!("+{s}")
            } else {
                s
            }
        }
    }
}

/// A rendered table. `cells` holds the display strings; `values` keeps the
/// unrounded numbers behind the numeric cells, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub title: String,
    pub columns: Vec<String>,
    pub cells: Vec<Vec<String>>,
    #[serde(default)]
    pub values: Vec<Vec<Option<f64>>>,
}

impl Table {
    fn new(name: &str, title: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            title: title.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            cells: Vec::new(),
            values: Vec::new(),
        }
    }

    fn push(&mut self, labels: &[&str], values: Vec<Option<f64>>, signed: bool) {
        let mut row: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        row.extend(values.iter().map(|v| if signed { format_signed_pct(*v) } else { format_pct(*v) }));
        self.cells.push(row);
        self.values.push(values);
    }

    /// Cell text by row label prefix and column header.
    pub fn cell(&self, labels: &[&str], column: &str) -> Option<&str> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.cells
            .iter()
            .find(|row| row.iter().zip(labels).all(|(a, b)| a == b))
            .map(|row| row[j].as_str())
    }
}

fn pct(v: Option<MetricValue>) -> Option<f64> {
    v.and_then(|m| m.female_pct())
}

fn metrics_for(results: &[GroupResult], pred: impl Fn(&GroupKey) -> bool) -> Option<&Metrics> {
    results.iter().find(|g| pred(&g.key)).map(|g| &g.metrics)
}

fn four_rates(m: Option<&Metrics>) -> Vec<Option<f64>> {
    [MetricKind::Wpr, MetricKind::Wsr, MetricKind::Wqr, MetricKind::Wfr]
        .into_iter()
        .map(|k| pct(m.and_then(|m| m.get(k))))
        .collect()
}

const RATE_COLUMNS: [&str; 4] = ["Manual", "Speech", "Name", "Face"];

fn medium_label(m: Medium) -> &'static str {
    match m {
        Medium::Radio => "Radio",
        Medium::Tv => "TV",
    }
}

fn category_label(c: ProgramCategory) -> &'static str {
    match c {
        ProgramCategory::News => "News",
        ProgramCategory::Entertainment => "Entertainment",
        ProgramCategory::MagazineDocumentary => "Magazine/Documentary",
        ProgramCategory::Sport => "Sport",
    }
}

fn capitalized(token: &str) -> String {
    let mut c = token.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

/// Everything the table templates draw from.
#[derive(Debug, Clone, Copy)]
pub struct ReportInputs<'a> {
    pub bundle: &'a CorpusBundle,
    pub names: &'a CorpusNameStats,
    pub population: &'a [AnalysisRow],
    pub mode: SpanMode,
    pub config: &'a MetricsConfig,
}

/// Descriptor rows against program and advertisement columns, over TV
/// channels with break timecodes.
pub fn table1(results: &[GroupResult]) -> Table {
    use crate::metrics::AdContext;
    let id = TableId::Table1;
    let mut t = Table::new(id.token(), id.title(), &["Descriptor", "TV program", "Advertisements"]);
    let program = metrics_for(results, |k| k.ad_context == Some(AdContext::InProgram));
    let breaks = metrics_for(results, |k| k.ad_context == Some(AdContext::InBreak));
    for (label, kind) in [
        ("Speech %", MetricKind::Wsr),
        ("Face %", MetricKind::Wfr),
        ("First Names %", MetricKind::Wqr),
    ] {
        let v = |m: Option<&Metrics>| pct(m.and_then(|m| m.get(kind)));
        t.push(&[label], vec![v(program), v(breaks)], false);
    }
    t
}

/// Medium by audience slot, from a medium × audience aggregation.
pub fn table2(results: &[GroupResult]) -> Table {
    let id = TableId::Table2;
    let mut t = Table::new(id.token(), id.title(), &["Media", "Audience", RATE_COLUMNS[0], RATE_COLUMNS[1], RATE_COLUMNS[2], RATE_COLUMNS[3]]);
    for medium in [Medium::Radio, Medium::Tv] {
        for slot in [AudienceSlot::Low, AudienceSlot::High] {
            let m = metrics_for(results, |k| k.medium == Some(medium) && k.audience == Some(slot));
            t.push(&[medium_label(medium), slot.token()], four_rates(m), false);
        }
    }
    t
}

/// Medium by channel status, from a medium × status aggregation.
pub fn table3(results: &[GroupResult]) -> Table {
    let id = TableId::Table3;
    let mut t = Table::new(id.token(), id.title(), &["Media", "chan. status", RATE_COLUMNS[0], RATE_COLUMNS[1], RATE_COLUMNS[2], RATE_COLUMNS[3]]);
    for medium in [Medium::Radio, Medium::Tv] {
        for status in [ChannelStatus::Private, ChannelStatus::Public] {
            let m = metrics_for(results, |k| k.medium == Some(medium) && k.status == Some(status));
            t.push(&[medium_label(medium), status.token()], four_rates(m), false);
        }
    }
    t
}

/// TV program categories, from a category aggregation over TV.
pub fn table4(results: &[GroupResult]) -> Table {
    let id = TableId::Table4;
    let mut t = Table::new(id.token(), id.title(), &["Program type", RATE_COLUMNS[0], RATE_COLUMNS[1], RATE_COLUMNS[2], RATE_COLUMNS[3]]);
    for category in [
        ProgramCategory::Entertainment,
        ProgramCategory::News,
        ProgramCategory::MagazineDocumentary,
        ProgramCategory::Sport,
    ] {
        let m = metrics_for(results, |k| k.category == Some(category));
        t.push(&[category_label(category)], four_rates(m), false);
    }
    t
}

/// After minus before, in percentage points, per medium and status, from a
/// medium × status × conflict aggregation over news programs.
pub fn table5(results: &[GroupResult]) -> Table {
    let id = TableId::Table5;
    let mut t = Table::new(id.token(), id.title(), &["Media", "chan. status", RATE_COLUMNS[0], RATE_COLUMNS[1], RATE_COLUMNS[2], RATE_COLUMNS[3]]);
    for medium in [Medium::Radio, Medium::Tv] {
        for status in [ChannelStatus::Private, ChannelStatus::Public] {
            let side = |p: ConflictPeriod| {
                four_rates(metrics_for(results, |k| {
                    k.medium == Some(medium) && k.status == Some(status) && k.conflict == Some(p)
                }))
            };
            let before = side(ConflictPeriod::Before);
            let after = side(ConflictPeriod::After);
            let diff = before
                .iter()
                .zip(&after)
                .map(|(b, a)| match (b, a) {
                    (Some(b), Some(a)) => Some(a - b),
                    _ => None,
                })
                .collect();
            let medium_text = capitalized(medium.token());
            let status_text = capitalized(status.token());
            t.push(&[&medium_text, &status_text], diff, true);
        }
    }
    t
}

/// Mean female probability of quoted names (percent) per medium and
/// audience slot, split by speaker gender.
pub fn table6(population: &[AnalysisRow]) -> Table {
    let id = TableId::Table6;
    let mut t = Table::new(id.token(), id.title(), &["Media", "Audience", "female speaker", "male speaker"]);
    let means = group_means(population, &[Factor::Medium, Factor::Audience, Factor::SpeakerGender]);
    for medium in [Medium::Radio, Medium::Tv] {
        for slot in [AudienceSlot::Low, AudienceSlot::High] {
            let v = |gender: &str| {
                let key = vec![medium.token().to_string(), slot.token().to_string(), gender.to_string()];
                means.get(&key).map(|(mean, _)| mean * 100.0)
            };
            let medium_text = capitalized(medium.token());
            let slot_text = capitalized(slot.token());
            t.push(&[&medium_text, &slot_text], vec![v("female"), v("male")], false);
        }
    }
    t
}

/// The aggregation each metrics template is built from.
pub fn grouping_for(id: TableId) -> Option<Grouping> {
    let g = match id {
        TableId::Table1 => Grouping::by(&[Dimension::AdContext]).with_filter(ProgramFilter {
            medium: Some(Medium::Tv),
            channels_with_breaks: true,
            ..ProgramFilter::default()
        }),
        TableId::Table2 => Grouping::by(&[Dimension::Medium, Dimension::Audience]),
        TableId::Table3 => Grouping::by(&[Dimension::Medium, Dimension::Status]),
        TableId::Table4 => Grouping::by(&[Dimension::Category]).with_filter(ProgramFilter {
            medium: Some(Medium::Tv),
            ..ProgramFilter::default()
        }),
        TableId::Table5 => Grouping::by(&[Dimension::Medium, Dimension::Status, Dimension::Conflict]).with_filter(
            ProgramFilter {
                category: Some(ProgramCategory::News),
                ..ProgramFilter::default()
            },
        ),
        TableId::Table6 => return None,
    };
    Some(g)
}

/// Applies a template to group results (tables 1 to 5) or to the
/// population rows (table 6).
pub fn render_table(id: TableId, results: &[GroupResult], population: &[AnalysisRow]) -> Table {
    match id {
        TableId::Table1 => table1(results),
        TableId::Table2 => table2(results),
        TableId::Table3 => table3(results),
        TableId::Table4 => table4(results),
        TableId::Table5 => table5(results),
        TableId::Table6 => table6(population),
    }
}

/// Computes the aggregation a template needs and fills it.
pub fn build_table(id: TableId, inputs: &ReportInputs<'_>) -> Table {
    let results = match grouping_for(id) {
        Some(g) => aggregate(inputs.bundle, inputs.names, &g, inputs.mode, inputs.config),
        None => Vec::new(),
    };
    render_table(id, &results, inputs.population)
}

fn format_stat(v: f64, decimals: usize) -> String {
    if v.is_infinite() {
        "inf".into()
    } else if v != 0.0 && v.abs() < 10f64.powi(-(decimals as i32)) {
        format!("{v:.3e}")
    } else {
        format!("{v:.decimals$}")
    }
}

/// Per-factor one-way ANOVA summary.
pub fn effects_table(report: &EffectReport) -> Table {
    let mut t = Table::new(
        "effects",
        "One-way ANOVA of first-name female probability per factor",
        &["Factor", "Levels", "df", "df resid", "F", "p", "eta2", "Significant", "Effect"],
    );
    for effect in &report.factors {
        let name = effect.factor.token();
        match &effect.anova {
            Some(a) => {
                t.cells.push(vec![
                    name.into(),
                    a.levels.to_string(),
                    a.df_effect.to_string(),
                    a.df_residual.to_string(),
                    format_stat(a.f_stat, 3),
                    format_stat(a.p_value, 4),
                    format_stat(a.eta_squared, 4),
                    if a.significant() { "yes" } else { "no" }.into(),
                    a.tier().label().into(),
                ]);
                t.values.push(vec![Some(a.f_stat), Some(a.p_value), Some(a.eta_squared)]);
            }
            None => {
                let mut row = vec![name.to_string()];
                row.extend(std::iter::repeat_n(UNDEFINED_CELL.to_string(), 8));
                t.cells.push(row);
                t.values.push(vec![None, None, None]);
            }
        }
    }
    t
}

/// One line per group with unrounded percentages, for the `compute` step.
pub fn groups_table(name: &str, results: &[GroupResult]) -> Table {
    let mut t = Table::new(name, "Group metrics", &["Group", "Programs", "WPR", "WSR", "WQR", "WFR"]);
    for g in results {
        let values = four_rates(Some(&g.metrics));
        let mut row = vec![g.key.to_string(), g.programs.to_string()];
        row.extend(values.iter().map(|v| match v {
            Some(x) => format!("{x}"),
            None => UNDEFINED_CELL.into(),
        }));
        t.cells.push(row);
        t.values.push(values);
    }
    t
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("delimited table is missing its title line")]
    MissingTitle,
    #[error("row {row} has {found} cells, expected {expected}")]
    Ragged { row: usize, found: usize, expected: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Comma-separated text: a `# name: title` line, the header, then rows.
pub fn to_delimited(table: &Table) -> Result<String, ReportError> {
    let mut out = format!("# {}: {}\n", table.name, table.title);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.cells {
        w.write_record(row)?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    out.push_str(&String::from_utf8(body).expect("csv output of UTF-8 cells is UTF-8"));
    Ok(out)
}

/// Parses [`to_delimited`] output. Unrounded values are not recoverable
/// and come back empty.
pub fn from_delimited(text: &str) -> Result<Table, ReportError> {
    let (first, rest) = text.split_once('\n').ok_or(ReportError::MissingTitle)?;
    let (name, title) = first
        .strip_prefix("# ")
        .and_then(|l| l.split_once(": "))
        .ok_or(ReportError::MissingTitle)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(rest.as_bytes());
    let columns: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
    let mut cells = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != columns.len() {
            return Err(ReportError::Ragged {
                row: i + 1,
                found: rec.len(),
                expected: columns.len(),
            });
        }
        cells.push(rec.iter().map(String::from).collect());
    }
    Ok(Table {
        name: name.into(),
        title: title.into(),
        columns,
        cells,
        values: Vec::new(),
    })
}

pub fn to_json(table: &Table) -> Result<String, ReportError> {
    Ok(serde_json::to_string_pretty(table)? + "\n")
}

fn is_numeric_cell(s: &str) -> bool {
    s == UNDEFINED_CELL || s == "inf" || s.parse::<f64>().is_ok()
}

/// Fixed-width text. Columns whose body cells are all numeric are right
/// aligned, the others left aligned.
pub fn to_aligned_text(table: &Table) -> String {
    let ncols = table.columns.len();
    let width = |j: usize| {
        table
            .cells
            .iter()
            .filter_map(|r| r.get(j))
            .chain(std::iter::once(&table.columns[j]))
            .map(|s| s.chars().count())
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..ncols).map(width).collect();
    let right: Vec<bool> = (0..ncols)
        .map(|j| !table.cells.is_empty() && table.cells.iter().all(|r| r.get(j).is_some_and(|c| is_numeric_cell(c))))
        .collect();
    let line = |row: &[String]| {
        let mut s = String::new();
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                s.push_str("  ");
            }
            let pad = widths[j].saturating_sub(cell.chars().count());
            if right[j] {
                s.extend(std::iter::repeat_n(' ', pad));
                s.push_str(cell);
            } else {
                s.push_str(cell);
                s.extend(std::iter::repeat_n(' ', pad));
            }
        }
        s.trim_end().to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{}: {}", table.name, table.title);
    let _ = writeln!(out, "{}", line(&table.columns));
    let rule: usize = widths.iter().sum::<usize>() + 2 * ncols.saturating_sub(1);
    let _ = writeln!(out, "{}", "-".repeat(rule));
    for row in &table.cells {
        let _ = writeln!(out, "{}", line(row));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Delimited,
    Structured,
    AlignedText,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Delimited => "csv",
            OutputFormat::Structured => "json",
            OutputFormat::AlignedText => "txt",
        }
    }

    pub fn render(self, table: &Table) -> Result<String, ReportError> {
        match self {
            OutputFormat::Delimited => to_delimited(table),
            OutputFormat::Structured => to_json(table),
            OutputFormat::AlignedText => Ok(to_aligned_text(table)),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Delimited => "delimited",
            OutputFormat::Structured => "structured",
            OutputFormat::AlignedText => "aligned-text",
        })
    }
}

impl FromStr for OutputFormat {
    type Err = ModelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "delimited" | "csv" => Ok(OutputFormat::Delimited),
            "structured" | "json" => Ok(OutputFormat::Structured),
            "aligned-text" | "text" | "txt" => Ok(OutputFormat::AlignedText),
            other => Err(ModelError::UnknownToken {
                kind: "output format",
                token: other.into(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::AdContext;
    use proptest::prelude::*;

    fn mv(kind: MetricKind, pct: f64) -> Option<MetricValue> {
        Some(MetricValue::new(kind, pct, 100.0))
    }

    fn metrics(wpr: f64, wsr: f64, wqr: f64, wfr: Option<f64>) -> Metrics {
        Metrics {
            wpr: mv(MetricKind::Wpr, wpr),
            wsr: mv(MetricKind::Wsr, wsr),
            wqr: mv(MetricKind::Wqr, wqr),
            wfr: wfr.and_then(|v| mv(MetricKind::Wfr, v)),
        }
    }

    #[test]
    fn rounding_half_away_from_zero() {
        assert_eq!(format_one_decimal(33.35), "33.4");
        assert_eq!(format_one_decimal(0.25), "0.3");
        assert_eq!(format_one_decimal(-0.25), "-0.3");
        assert_eq!(format_one_decimal(-0.04), "0.0");
        assert_eq!(format_one_decimal(12.0), "12.0");
        assert_eq!(format_signed_pct(Some(1.66)), "+1.7");
        assert_eq!(format_signed_pct(Some(-0.2)), "-0.2");
        assert_eq!(format_signed_pct(Some(0.01)), "0.0");
        assert_eq!(format_signed_pct(None), "-");
    }

    #[test]
    fn table1_layout() {
        let results = vec![
            GroupResult {
                key: GroupKey {
                    ad_context: Some(AdContext::InProgram),
                    ..GroupKey::default()
                },
                programs: 3,
                metrics: metrics(40.0, 33.6, 33.8, Some(40.2)),
            },
            GroupResult {
                key: GroupKey {
                    ad_context: Some(AdContext::InBreak),
                    ..GroupKey::default()
                },
                programs: 3,
                metrics: Metrics {
                    wpr: None,
                    ..metrics(0.0, 43.3, 36.2, Some(47.9))
                },
            },
        ];
        let t = table1(&results);
        assert_eq!(t.columns, ["Descriptor", "TV program", "Advertisements"]);
        assert_eq!(t.cells[0], ["Speech %", "33.6", "43.3"]);
        assert_eq!(t.cells[1], ["Face %", "40.2", "47.9"]);
        assert_eq!(t.cells[2], ["First Names %", "33.8", "36.2"]);
    }

    #[test]
    fn empty_group_renders_dash() {
        let results = vec![GroupResult {
            key: GroupKey {
                medium: Some(Medium::Radio),
                audience: Some(AudienceSlot::Low),
                ..GroupKey::default()
            },
            programs: 1,
            metrics: metrics(41.3, 33.4, 29.3, None),
        }];
        let t = table2(&results);
        assert_eq!(t.cells.len(), 4);
        assert_eq!(t.cells[0], ["Radio", "low", "41.3", "33.4", "29.3", "-"]);
        assert_eq!(t.cells[3], ["TV", "high", "-", "-", "-", "-"]);
        assert_eq!(t.cell(&["Radio", "low"], "Name"), Some("29.3"));
    }

    #[test]
    fn undefined_metric_value_is_dash() {
        let results = vec![GroupResult {
            key: GroupKey {
                category: Some(ProgramCategory::Sport),
                ..GroupKey::default()
            },
            programs: 1,
            metrics: Metrics {
                wsr: Some(MetricValue::undefined(MetricKind::Wsr)),
                ..metrics(21.5, 0.0, 10.9, Some(12.0))
            },
        }];
        let t = table4(&results);
        assert_eq!(t.cells[3], ["Sport", "21.5", "-", "10.9", "12.0"]);
    }

    #[test]
    fn table5_signed_differences() {
        let mut results = Vec::new();
        for (period, wsr) in [(ConflictPeriod::Before, 30.0), (ConflictPeriod::After, 31.7)] {
            results.push(GroupResult {
                key: GroupKey {
                    medium: Some(Medium::Tv),
                    status: Some(ChannelStatus::Private),
                    conflict: Some(period),
                    ..GroupKey::default()
                },
                programs: 1,
                metrics: metrics(40.0, wsr, 30.0, Some(35.0)),
            });
        }
        let t = table5(&results);
        assert_eq!(t.cells[2], ["Tv", "Private", "0.0", "+1.7", "0.0", "0.0"]);
        assert_eq!(t.cells[0][2], "-");
    }

    fn row(y: f64, medium: &str, audience: &str, gender: &str) -> AnalysisRow {
        let mut levels: [String; 7] = Default::default();
        levels[Factor::Medium.index()] = medium.into();
        levels[Factor::Audience.index()] = audience.into();
        levels[Factor::SpeakerGender.index()] = gender.into();
        AnalysisRow::new(y, levels)
    }

    #[test]
    fn table6_shape() {
        let rows = vec![
            row(1.0, "tv", "high", "female"),
            row(0.0, "tv", "high", "female"),
            row(0.25, "radio", "low", "male"),
        ];
        let t = table6(&rows);
        assert_eq!(t.columns.len(), 4);
        assert_eq!(t.cells.len(), 4);
        assert_eq!(t.cells[0], ["Radio", "Low", "-", "25.0"]);
        assert_eq!(t.cells[3], ["Tv", "High", "50.0", "-"]);
    }

    #[test]
    fn table_tokens_parse() {
        for id in TableId::ALL {
            assert_eq!(id.token().parse::<TableId>().unwrap(), id);
        }
        assert!("table7".parse::<TableId>().is_err());
    }

    #[test]
    fn aligned_text_layout() {
        let mut t = Table::new("t", "Title", &["Name", "Value"]);
        t.push(&["a"], vec![Some(1.0)], false);
        t.push(&["long label"], vec![None], false);
        let text = to_aligned_text(&t);
        assert_eq!(text, "t: Title\nName        Value\n-----------------\na             1.0\nlong label      -\n");
    }

    fn arb_table() -> impl Strategy<Value = Table> {
        let cell = prop_oneof![
            "[A-Za-z/ %.,\"é]{0,12}",
            (-1000.0f64..1000.0).prop_map(format_one_decimal),
            Just(UNDEFINED_CELL.to_string()),
        ];
        (1usize..6, 0usize..8).prop_flat_map(move |(ncols, nrows)| {
            (
                proptest::collection::vec("[A-Za-z. ]{1,10}", ncols),
                proptest::collection::vec(proptest::collection::vec(cell.clone(), ncols), nrows),
                "[a-z0-9]{1,8}",
                "[A-Za-z (%)]{0,30}",
            )
                .prop_map(|(columns, cells, name, title)| Table {
                    name,
                    title,
                    columns,
                    cells,
                    values: Vec::new(),
                })
        })
    }

    proptest! {
        #[test]
        fn delimited_readback_renders_identically(t in arb_table()) {
            let text = to_delimited(&t).unwrap();
            let back = from_delimited(&text).unwrap();
            prop_assert_eq!(to_aligned_text(&back), to_aligned_text(&t));
            prop_assert_eq!(to_delimited(&back).unwrap(), text);
        }

        #[test]
        fn rounding_matches_decimal_reference(tenths in -100_000i64..100_000, frac in 0u8..10) {
            // A value with two decimals rounds by looking at the second one.
            let hundredths = tenths * 10 + if tenths < 0 { -(frac as i64) } else { frac as i64 };
            let v = hundredths as f64 / 100.0;
            let abs = hundredths.abs();
            let rounded = abs / 10 + i64::from(abs % 10 >= 5);
            let expected = if rounded == 0 {
                "0.0".to_string()
            } else {
                format!("{}{}.{}", if hundredths < 0 { "-" } else { "" }, rounded / 10, rounded % 10)
            };
            prop_assert_eq!(format_one_decimal(v), expected);
        }
    }
}
