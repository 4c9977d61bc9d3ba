//! Effect modelling for the first-name quotation population.
//!
//! Each [`AnalysisRow`] is one utterance: its mean female attribution
//! probability and seven categorical factors. Factors are analysed one at a
//! time with a one-way ANOVA, and jointly with an additive least squares fit.

mod ols;
pub mod special;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use ols::{ols_fit, ols_fit_dropping_aliased, wls_fit, Design, OlsFit};
pub use special::{betainc, f_sf, ln_beta, ln_gamma};

/// Significance level for the per-factor F tests.
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;
/// η² at or above which an effect is labelled small.
pub const SMALL_EFFECT: f64 = 0.01;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("argument outside the function domain")]
    Domain,
    #[error("continued fraction did not converge")]
    NoConvergence,
    #[error("design and response lengths differ")]
    DimensionMismatch,
    #[error("design is rank deficient at column {column}")]
    RankDeficient { column: String },
    #[error("factor {factor} has fewer than two levels in the population")]
    SingleLevelFactor { factor: Factor },
    #[error("factor {factor}: {rows} rows cannot support {levels} levels")]
    TooFewRows { factor: Factor, rows: usize, levels: usize },
    #[error("response has zero variance, F is undefined")]
    ZeroVariance,
    #[error("population is empty")]
    EmptyPopulation,
    #[error("row {line}: {reason}")]
    InvalidRow { line: u64, reason: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    Medium,
    Channel,
    Status,
    Category,
    Audience,
    Conflict,
    SpeakerGender,
}

impl Factor {
    pub const ALL: [Factor; 7] = [
        Factor::Medium,
        Factor::Channel,
        Factor::Status,
        Factor::Category,
        Factor::Audience,
        Factor::Conflict,
        Factor::SpeakerGender,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn token(self) -> &'static str {
        match self {
            Factor::Medium => "medium",
            Factor::Channel => "channel",
            Factor::Status => "status",
            Factor::Category => "category",
            Factor::Audience => "audience",
            Factor::Conflict => "conflict",
            Factor::SpeakerGender => "speaker_gender",
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        Factor::ALL
            .into_iter()
            .find(|f| f.token() == norm)
            .ok_or_else(|| format!("unknown factor {s:?}"))
    }
}

/// One utterance of the stats population.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRow {
    /// Mean female probability of the first names quoted, in [0, 1].
    pub y: f64,
    /// Frequency weight; 1 unless rows are weighted by hit count.
    pub weight: f64,
    /// Level per factor, indexed by [`Factor::index`].
    pub levels: [String; 7],
}

impl AnalysisRow {
    pub fn new(y: f64, levels: [String; 7]) -> Self {
        AnalysisRow { y, weight: 1.0, levels }
    }

    pub fn level(&self, factor: Factor) -> &str {
        &self.levels[factor.index()]
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn csum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Sorted distinct levels of `factor` in `rows`.
pub fn factor_levels(rows: &[AnalysisRow], factor: Factor) -> Vec<String> {
    let mut levels: Vec<String> = rows.iter().map(|r| r.level(factor).to_string()).collect();
    levels.sort();
    levels.dedup();
    levels
}

/// Treatment-coded design for one factor: an intercept plus one indicator
/// per non-reference level. The reference is the smallest level.
pub fn build_design(rows: &[AnalysisRow], factor: Factor) -> Result<(Design, Vec<f64>), StatsError> {
    let levels = factor_levels(rows, factor);
    if levels.len() < 2 {
        return Err(StatsError::SingleLevelFactor { factor });
    }
    let mut design = Design::new(rows.len());
    design.push_column("intercept", vec![1.0; rows.len()]);
    for level in &levels[1..] {
        let col = rows.iter().map(|r| f64::from(u8::from(r.level(factor) == level))).collect();
        design.push_column(format!("{factor}={level}"), col);
    }
    Ok((design, rows.iter().map(|r| r.y).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectTier {
    None,
    Small,
}

impl EffectTier {
    pub fn from_eta_squared(eta: f64) -> Self {
        if eta >= SMALL_EFFECT {
            EffectTier::Small
        } else {
            EffectTier::None
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EffectTier::None => "none",
            EffectTier::Small => "small",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaResult {
    pub factor: Factor,
    pub levels: usize,
    pub ss_effect: f64,
    pub ss_residual: f64,
    pub ss_total: f64,
    pub df_effect: u64,
    pub df_residual: u64,
    pub f_stat: f64,
    pub p_value: f64,
    pub eta_squared: f64,
}

impl AnovaResult {
    pub fn significant(&self) -> bool {
        self.p_value < SIGNIFICANCE_LEVEL
    }

    pub fn tier(&self) -> EffectTier {
        EffectTier::from_eta_squared(self.eta_squared)
    }
}

/// Weighted mean and total weight of `y` per level of `factor`.
fn level_moments(rows: &[AnalysisRow], factor: Factor) -> BTreeMap<&str, (CompensatedSum, CompensatedSum)> {
    let mut acc: BTreeMap<&str, (CompensatedSum, CompensatedSum)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.level(factor)).or_default();
        e.0.add(r.weight);
        e.1.add(r.weight * r.y);
    }
    acc
}

/// One-way ANOVA of `y` on `factor`. Row weights act as frequency weights.
pub fn one_way_anova(rows: &[AnalysisRow], factor: Factor) -> Result<AnovaResult, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::EmptyPopulation);
    }
    if rows.iter().any(|r| !(r.weight.is_finite() && r.weight > 0.0) || !r.y.is_finite()) {
        return Err(StatsError::Domain);
    }
    let moments = level_moments(rows, factor);
    let k = moments.len();
    if k < 2 {
        return Err(StatsError::SingleLevelFactor { factor });
    }
    let total_w = csum(rows.iter().map(|r| r.weight));
    let n = total_w.round() as u64;
    if n <= k as u64 {
        return Err(StatsError::TooFewRows {
            factor,
            rows: rows.len(),
            levels: k,
        });
    }
    let grand = csum(rows.iter().map(|r| r.weight * r.y)) / total_w;
    let means: BTreeMap<&str, f64> = moments.iter().map(|(l, (w, s))| (*l, s.value() / w.value())).collect();

    let ss_total = csum(rows.iter().map(|r| r.weight * (r.y - grand).powi(2)));
    let ss_residual = csum(rows.iter().map(|r| r.weight * (r.y - means[r.level(factor)]).powi(2)));
    let ss_effect = csum(moments.iter().map(|(l, (w, _))| w.value() * (means[l] - grand).powi(2)));
    if ss_total <= 0.0 {
        return Err(StatsError::ZeroVariance);
    }

    let df_effect = (k - 1) as u64;
    let df_residual = n - k as u64;
    let (f_stat, p_value) = if ss_effect <= 0.0 {
        (0.0, 1.0)
    } else if ss_residual <= 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ss_effect / df_effect as f64) / (ss_residual / df_residual as f64);
        (f, f_sf(f, df_effect as f64, df_residual as f64)?)
    };
    Ok(AnovaResult {
        factor,
        levels: k,
        ss_effect,
        ss_residual,
        ss_total,
        df_effect,
        df_residual,
        f_stat,
        p_value,
        eta_squared: (ss_effect / ss_total).clamp(0.0, 1.0),
    })
}

/// Mean response per combination of `factors`, with the total weight behind it.
pub fn group_means(rows: &[AnalysisRow], factors: &[Factor]) -> BTreeMap<Vec<String>, (f64, f64)> {
    let mut acc: BTreeMap<Vec<String>, (CompensatedSum, CompensatedSum)> = BTreeMap::new();
    for r in rows {
        let key = factors.iter().map(|f| r.level(*f).to_string()).collect();
        let e = acc.entry(key).or_default();
        e.0.add(r.weight);
        e.1.add(r.weight * r.y);
    }
    acc.into_iter()
        .map(|(k, (w, s))| (k, (s.value() / w.value(), w.value())))
        .collect()
}

/// Per-factor outcome of the effect report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorEffect {
    pub factor: Factor,
    pub anova: Option<AnovaResult>,
    pub significant: bool,
    pub tier: Option<EffectTier>,
    /// Why no ANOVA could be run, if so.
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointCoefficient {
    pub term: String,
    /// `None` when the column is aliased with earlier terms.
    pub estimate: Option<f64>,
}

/// Additive fit over every factor with at least two levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointFit {
    pub rows: usize,
    pub rank: usize,
    pub rss: f64,
    pub r_squared: f64,
    pub coefficients: Vec<JointCoefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectReport {
    pub rows: usize,
    pub mean_y: f64,
    pub factors: Vec<FactorEffect>,
    pub joint: Option<JointFit>,
}

impl EffectReport {
    pub fn effect(&self, factor: Factor) -> &FactorEffect {
        &self.factors[factor.index()]
    }
}

/// Treatment-coded design over several factors at once. Factors with a
/// single level contribute no column.
pub fn build_joint_design(rows: &[AnalysisRow], factors: &[Factor]) -> Design {
    let mut design = Design::new(rows.len());
    design.push_column("intercept", vec![1.0; rows.len()]);
    for &factor in factors {
        let levels = factor_levels(rows, factor);
        for level in levels.iter().skip(1) {
            let col = rows.iter().map(|r| f64::from(u8::from(r.level(factor) == level))).collect();
            design.push_column(format!("{factor}={level}"), col);
        }
    }
    design
}

fn joint_fit(rows: &[AnalysisRow]) -> Result<JointFit, StatsError> {
    let design = build_joint_design(rows, &Factor::ALL);
    let y: Vec<f64> = rows.iter().map(|r| r.y).collect();
    let w: Vec<f64> = rows.iter().map(|r| r.weight).collect();
    let fit = ols_fit_dropping_aliased(&design, &y, Some(&w))?;
    let total_w = csum(w.iter().copied());
    let grand = csum(rows.iter().map(|r| r.weight * r.y)) / total_w;
    let ss_total = csum(rows.iter().map(|r| r.weight * (r.y - grand).powi(2)));
    let r_squared = if ss_total > 0.0 {
        (1.0 - fit.rss / ss_total).clamp(0.0, 1.0)
    } else {
        0.0
    };
    Ok(JointFit {
        rows: rows.len(),
        rank: fit.rank,
        rss: fit.rss,
        r_squared,
        coefficients: design
            .names
            .iter()
            .zip(&fit.coefficients)
            .map(|(term, b)| JointCoefficient {
                term: term.clone(),
                estimate: b.is_finite().then_some(*b),
            })
            .collect(),
    })
}

/// One-way ANOVA for each of the seven factors plus the joint additive fit.
/// Factors that cannot be tested are reported as skipped.
pub fn effect_report(rows: &[AnalysisRow]) -> Result<EffectReport, StatsError> {
    if rows.is_empty() {
        return Err(StatsError::EmptyPopulation);
    }
    let mut factors = Vec::with_capacity(Factor::ALL.len());
    for factor in Factor::ALL {
        let effect = match one_way_anova(rows, factor) {
            Ok(a) => FactorEffect {
                factor,
                significant: a.significant(),
                tier: Some(a.tier()),
                anova: Some(a),
                skipped: None,
            },
            Err(e @ (StatsError::SingleLevelFactor { .. } | StatsError::TooFewRows { .. } | StatsError::ZeroVariance)) => {
                FactorEffect {
                    factor,
                    anova: None,
                    significant: false,
                    tier: None,
                    skipped: Some(e.to_string()),
                }
            }
            Err(e) => return Err(e),
        };
        factors.push(effect);
    }
    let total_w = csum(rows.iter().map(|r| r.weight));
    let mean_y = csum(rows.iter().map(|r| r.weight * r.y)) / total_w;
    let joint = if rows.len() > 1 { Some(joint_fit(rows)?) } else { None };
    Ok(EffectReport {
        rows: rows.len(),
        mean_y,
        factors,
        joint,
    })
}

const WEIGHT_COLUMN: &str = "weight";

/// Writes rows as CSV: `y`, the seven factors in canonical order, then `weight`.
pub fn write_rows<W: Write>(writer: W, rows: &[AnalysisRow]) -> Result<(), StatsError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["y"];
    header.extend(Factor::ALL.iter().map(|f| f.token()));
    header.push(WEIGHT_COLUMN);
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.y.to_string()];
        rec.extend(r.levels.iter().cloned());
        rec.push(r.weight.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads rows written by [`write_rows`]. The weight column may be absent.
pub fn read_rows<R: Read>(reader: R) -> Result<Vec<AnalysisRow>, StatsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    let expected: Vec<&str> = std::iter::once("y").chain(Factor::ALL.iter().map(|f| f.token())).collect();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    let has_weight = match names.len() {
        8 => false,
        9 if names[8] == WEIGHT_COLUMN => true,
        _ => {
            return Err(StatsError::InvalidRow {
                line: 1,
                reason: format!("expected header {}[,{WEIGHT_COLUMN}]", expected.join(",")),
            })
        }
    };
    if names[..8] != expected[..] {
        return Err(StatsError::InvalidRow {
            line: 1,
            reason: format!("expected header {}[,{WEIGHT_COLUMN}]", expected.join(",")),
        });
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |reason: String| StatsError::InvalidRow { line, reason };
        let y: f64 = rec[0].trim().parse().map_err(|_| bad(format!("invalid y {:?}", &rec[0])))?;
        if !(0.0..=1.0).contains(&y) {
            return Err(bad(format!("y {y} outside [0, 1]")));
        }
        let mut levels: [String; 7] = Default::default();
        for (i, slot) in levels.iter_mut().enumerate() {
            let v = rec[i + 1].trim();
            if v.is_empty() {
                return Err(bad(format!("empty {} level", Factor::ALL[i])));
            }
            *slot = v.to_string();
        }
        let weight = if has_weight {
            let w: f64 = rec[8].trim().parse().map_err(|_| bad(format!("invalid weight {:?}", &rec[8])))?;
            if !(w.is_finite() && w > 0.0) {
                return Err(bad(format!("weight {w} must be positive")));
            }
            w
        } else {
            1.0
        };
        rows.push(AnalysisRow { y, weight, levels });
    }
    Ok(rows)
}
