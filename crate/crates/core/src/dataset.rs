//! Labeled prediction data: ingestion, validation and empirical class CDFs.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One labeled forecast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    /// `true` for the positive class (label 1).
    pub label: bool,
    /// Forecast probability in `[0, 1]`.
    pub score: f64,
}

impl Observation {
    pub fn y(&self) -> f64 {
        if self.label {
            1.0
        } else {
            0.0
        }
    }
}

/// All rows sharing one distinct score value, with per-class counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreGroup {
    pub score: f64,
    pub negatives: usize,
    pub positives: usize,
}

impl ScoreGroup {
    pub fn count(&self) -> usize {
        self.negatives + self.positives
    }
}

/// Column names used when reading or writing CSV.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvSchema {
    pub label: String,
    pub score: String,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            label: "y_true".to_string(),
            score: "y_pred".to_string(),
        }
    }
}

impl CsvSchema {
    pub fn new(label: impl Into<String>, score: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            score: score.into(),
        }
    }
}

/// A validated, non-empty collection of `(label, score)` pairs.
///
/// Rows keep their input order (so several models scored on the same cohort
/// can be matched row by row) and a stable canonical permutation sorted by
/// nondecreasing score. Duplicate rows are kept with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledScores {
    rows: Vec<Observation>,
    order: Vec<usize>,
    n_pos: usize,
}

impl LabeledScores {
    pub fn new(rows: Vec<Observation>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyDataset);
        }
        for (i, row) in rows.iter().enumerate() {
            if !(0.0..=1.0).contains(&row.score) {
                return Err(Error::ScoreOutOfRange {
                    row: i + 1,
                    value: row.score.to_string(),
                });
            }
        }
        let mut order: Vec<usize> = (0..rows.len()).collect();
        order.sort_by(|&i, &j| rows[i].score.total_cmp(&rows[j].score));
        let n_pos = rows.iter().filter(|r| r.label).count();
        Ok(Self { rows, order, n_pos })
    }

    /// Build from parallel slices; labels must be exactly 0 or 1.
    pub fn from_pairs(labels: &[u8], scores: &[f64]) -> Result<Self> {
        if labels.len() != scores.len() {
            return Err(Error::LengthMismatch {
                labels: labels.len(),
                scores: scores.len(),
            });
        }
        let rows = labels
            .iter()
            .zip(scores)
            .enumerate()
            .map(|(i, (&y, &s))| match y {
                0 | 1 => Ok(Observation {
                    label: y == 1,
                    score: s,
                }),
                other => Err(Error::NonBinaryLabel {
                    row: i + 1,
                    value: other.to_string(),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// Same labels (in input order) paired with new scores.
    pub fn with_scores(&self, scores: &[f64]) -> Result<Self> {
        if scores.len() != self.rows.len() {
            return Err(Error::LengthMismatch {
                labels: self.rows.len(),
                scores: scores.len(),
            });
        }
        Self::new(
            self.rows
                .iter()
                .zip(scores)
                .map(|(r, &score)| Observation {
                    label: r.label,
                    score,
                })
                .collect(),
        )
    }

    /// Apply `f` to every score, keeping labels.
    pub fn map_scores(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let scores: Vec<f64> = self.rows.iter().map(|r| f(r.score)).collect();
        self.with_scores(&scores)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_pos(&self) -> usize {
        self.n_pos
    }

    pub fn n_neg(&self) -> usize {
        self.rows.len() - self.n_pos
    }

    /// Fraction of rows with label 1.
    pub fn prevalence(&self) -> f64 {
        self.n_pos as f64 / self.rows.len() as f64
    }

    /// Rows in input order.
    pub fn rows(&self) -> &[Observation] {
        &self.rows
    }

    /// Rows in canonical (nondecreasing score) order.
    pub fn canonical(&self) -> impl ExactSizeIterator<Item = &Observation> + '_ {
        self.order.iter().map(move |&i| &self.rows[i])
    }

    /// Canonical position → input index.
    pub fn canonical_order(&self) -> &[usize] {
        &self.order
    }

    pub fn labels(&self) -> impl Iterator<Item = bool> + '_ {
        self.rows.iter().map(|r| r.label)
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.score)
    }

    /// Distinct scores in ascending order with per-class counts.
    pub fn score_groups(&self) -> Vec<ScoreGroup> {
        let mut groups: Vec<ScoreGroup> = Vec::new();
        for row in self.canonical() {
            match groups.last_mut() {
                Some(g) if g.score == row.score => {
                    if row.label {
                        g.positives += 1;
                    } else {
                        g.negatives += 1;
                    }
                }
                _ => groups.push(ScoreGroup {
                    score: row.score,
                    negatives: usize::from(!row.label),
                    positives: usize::from(row.label),
                }),
            }
        }
        groups
    }

    /// Read a CSV with a header row containing the schema's columns.
    pub fn load_csv<R: Read>(source: R, schema: &CsvSchema) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let headers = reader.headers().map_err(csv_error)?.clone();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::MissingColumn(name.to_string()))
        };
        let label_col = find(&schema.label)?;
        let score_col = find(&schema.score)?;

        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| match e.kind() {
                csv::ErrorKind::Io(_) => csv_error(e),
                _ => Error::MalformedRow {
                    row,
                    reason: e.to_string(),
                },
            })?;
            let field = |col: usize, name: &str| {
                record.get(col).ok_or_else(|| Error::MalformedRow {
                    row,
                    reason: format!("missing field `{name}`"),
                })
            };
            let label = parse_label(field(label_col, &schema.label)?, row)?;
            let score = parse_score(field(score_col, &schema.score)?, row)?;
            rows.push(Observation { label, score });
        }
        Self::new(rows)
    }

    /// Write rows in input order using the schema's column names.
    pub fn write_csv<W: Write>(&self, sink: W, schema: &CsvSchema) -> Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        writer
            .write_record([schema.label.as_str(), schema.score.as_str()])
            .map_err(csv_error)?;
        for row in &self.rows {
            writer
                .write_record([
                    if row.label { "1" } else { "0" }.to_string(),
                    format!("{:?}", row.score),
                ])
                .map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Empirical class-conditional CDFs over the distinct scores.
    pub fn empirical_cdfs(&self, convention: TieConvention) -> EmpiricalDistributionPair {
        EmpiricalDistributionPair::from_groups(&self.score_groups(), convention)
    }
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::MalformedRow {
            row: e.position().map_or(0, |p| p.record() as usize),
            reason: e.to_string(),
        }
    }
}

fn parse_number(token: &str, row: usize) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::MalformedRow {
        row,
        reason: format!("`{token}` is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::MalformedRow {
            row,
            reason: format!("non-finite value `{token}`"),
        });
    }
    Ok(value)
}

fn parse_label(token: &str, row: usize) -> Result<bool> {
    let value = parse_number(token, row).map_err(|_| Error::NonBinaryLabel {
        row,
        value: token.to_string(),
    })?;
    if value == 0.0 {
        Ok(false)
    } else if value == 1.0 {
        Ok(true)
    } else {
        Err(Error::NonBinaryLabel {
            row,
            value: token.to_string(),
        })
    }
}

fn parse_score(token: &str, row: usize) -> Result<f64> {
    let value = parse_number(token, row)?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ScoreOutOfRange {
            row,
            value: token.to_string(),
        });
    }
    Ok(value)
}

/// How the CDF value at an observed score treats the mass sitting exactly on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieConvention {
    /// `P(s ≤ v)`.
    #[default]
    Standard,
    /// `P(s < v) + ½·P(s = v)`.
    MidDistribution,
}

/// Step CDFs of the negative and positive class scores.
///
/// A class with no rows has no CDF; accessors return `None` for it.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistributionPair {
    breakpoints: Vec<f64>,
    neg_cum: Option<Vec<f64>>,
    pos_cum: Option<Vec<f64>>,
    neg_below: Vec<f64>,
    pos_below: Vec<f64>,
    prevalence: f64,
    convention: TieConvention,
}

impl EmpiricalDistributionPair {
    fn from_groups(groups: &[ScoreGroup], convention: TieConvention) -> Self {
        let n_neg: usize = groups.iter().map(|g| g.negatives).sum();
        let n_pos: usize = groups.iter().map(|g| g.positives).sum();
        let mut breakpoints = Vec::with_capacity(groups.len());
        let (mut neg_cum, mut pos_cum) = (Vec::new(), Vec::new());
        let (mut neg_below, mut pos_below) = (Vec::new(), Vec::new());
        let (mut acc_neg, mut acc_pos) = (0usize, 0usize);
        let frac = |k: f64, n: usize| if n == 0 { 0.0 } else { k / n as f64 };
        for g in groups {
            breakpoints.push(g.score);
            neg_below.push(frac(acc_neg as f64, n_neg));
            pos_below.push(frac(acc_pos as f64, n_pos));
            let (neg_at, pos_at) = match convention {
                TieConvention::Standard => (
                    (acc_neg + g.negatives) as f64,
                    (acc_pos + g.positives) as f64,
                ),
                TieConvention::MidDistribution => (
                    acc_neg as f64 + 0.5 * g.negatives as f64,
                    acc_pos as f64 + 0.5 * g.positives as f64,
                ),
            };
            neg_cum.push(frac(neg_at, n_neg));
            pos_cum.push(frac(pos_at, n_pos));
            acc_neg += g.negatives;
            acc_pos += g.positives;
        }
        let total = n_neg + n_pos;
        Self {
            breakpoints,
            neg_cum: (n_neg > 0).then_some(neg_cum),
            pos_cum: (n_pos > 0).then_some(pos_cum),
            neg_below,
            pos_below,
            prevalence: if total == 0 {
                0.0
            } else {
                n_pos as f64 / total as f64
            },
            convention,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn convention(&self) -> TieConvention {
        self.convention
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence
    }

    /// CDF values of the negative class at each breakpoint.
    pub fn negative_cum(&self) -> Option<&[f64]> {
        self.neg_cum.as_deref()
    }

    /// CDF values of the positive class at each breakpoint.
    pub fn positive_cum(&self) -> Option<&[f64]> {
        self.pos_cum.as_deref()
    }

    /// True when either class has no rows.
    pub fn is_degenerate(&self) -> bool {
        self.neg_cum.is_none() || self.pos_cum.is_none()
    }

    /// `F0(t)` under this pair's tie convention.
    pub fn negative_cdf(&self, t: f64) -> Option<f64> {
        self.neg_cum
            .as_ref()
            .map(|cum| self.eval(cum, &self.neg_below, t))
    }

    /// `F1(t)` under this pair's tie convention.
    pub fn positive_cdf(&self, t: f64) -> Option<f64> {
        self.pos_cum
            .as_ref()
            .map(|cum| self.eval(cum, &self.pos_below, t))
    }

    /// `(1−π)·F0(t) + π·F1(t)`, defined even if one class is empty.
    pub fn pooled_cdf(&self, t: f64) -> f64 {
        let f0 = self.negative_cdf(t).unwrap_or(0.0);
        let f1 = self.positive_cdf(t).unwrap_or(0.0);
        (1.0 - self.prevalence) * f0 + self.prevalence * f1
    }

    fn eval(&self, cum: &[f64], below: &[f64], t: f64) -> f64 {
        // index of the first breakpoint strictly greater than t
        let k = self.breakpoints.partition_point(|&v| v <= t);
        if k == 0 {
            return 0.0;
        }
        if self.breakpoints[k - 1] == t {
            return cum[k - 1];
        }
        // strictly between breakpoints: every convention agrees on P(s ≤ t)
        if k < below.len() {
            below[k]
        } else {
            1.0
        }
    }
}
