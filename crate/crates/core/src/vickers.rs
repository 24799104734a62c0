//! Synthetic archetype benchmark: eight classifier archetypes applied to a
//! simulated cohort, scored by AUC, Brier, net benefit and bounded Brier.

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::Serialize;

use crate::dataset::{LabeledScores, Observation};
use crate::dca::{bounded_net_benefit, net_benefit, treat_all_net_benefit};
use crate::error::{Error, Result};
use crate::interval::{logit, sigmoid, ThresholdInterval};
use crate::ranking::auc_roc;
use crate::scoring::{bounded_brier, brier};

/// Concentration `κ` of the Beta(πκ, (1−π)κ) risk distribution.
///
/// Chosen by `cargo run --release --example tune_concentration`, which scans
/// `κ` for the well-calibrated archetype's AUC and the ordering agreement
/// between NB@5% and bounded Brier across seeds.
pub const CONCENTRATION: f64 = 5.5;

/// Net-benefit thresholds reported in the table.
pub const NB_THRESHOLDS: [f64; 3] = [0.05, 0.10, 0.20];

/// Cost-ratio range of the bounded Brier column.
pub fn bounded_range() -> ThresholdInterval {
    ThresholdInterval::new(0.05, 0.2).expect("valid")
}

/// Simulated subjects: latent risk and a Bernoulli(risk) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub risk: Vec<f64>,
    pub labels: Vec<bool>,
    pub seed: u64,
}

impl Cohort {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn prevalence(&self) -> f64 {
        self.labels.iter().filter(|&&y| y).count() as f64 / self.len() as f64
    }
}

/// Draw `n` risks from Beta(πκ, (1−π)κ) and labels from Bernoulli(risk).
pub fn generate_cohort(n: usize, prevalence: f64, seed: u64) -> Result<Cohort> {
    generate_cohort_with(n, prevalence, seed, CONCENTRATION)
}

/// [`generate_cohort`] with an explicit concentration.
pub fn generate_cohort_with(
    n: usize,
    prevalence: f64,
    seed: u64,
    concentration: f64,
) -> Result<Cohort> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cohort size must be at least 1".to_string(),
        ));
    }
    if !(prevalence > 0.0 && prevalence < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "prevalence must lie in (0, 1), got {prevalence}"
        )));
    }
    let dist = Beta::new(
        prevalence * concentration,
        (1.0 - prevalence) * concentration,
    )
    .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let risk: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let labels = risk.iter().map(|&r| rng.random::<f64>() < r).collect();
    Ok(Cohort { risk, labels, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Archetype {
    WellCalibrated,
    Underestimating,
    SeverelyUnderestimating,
    Overestimating,
    HighlySensitive,
    HighlySpecific,
    AssumeAllPositive,
    AssumeAllNegative,
}

impl Archetype {
    pub const ALL: [Archetype; 8] = [
        Archetype::WellCalibrated,
        Archetype::Underestimating,
        Archetype::SeverelyUnderestimating,
        Archetype::Overestimating,
        Archetype::HighlySensitive,
        Archetype::HighlySpecific,
        Archetype::AssumeAllPositive,
        Archetype::AssumeAllNegative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Archetype::WellCalibrated => "well-calibrated",
            Archetype::Underestimating => "underestimating",
            Archetype::SeverelyUnderestimating => "severely-underestimating",
            Archetype::Overestimating => "overestimating",
            Archetype::HighlySensitive => "highly-sensitive",
            Archetype::HighlySpecific => "highly-specific",
            Archetype::AssumeAllPositive => "assume-all-positive",
            Archetype::AssumeAllNegative => "assume-all-negative",
        }
    }
}

impl fmt::Display for Archetype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Tunable archetype parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArchetypeParams {
    /// Log-odds shift magnitude for under/overestimating.
    pub shift: f64,
    /// Log-odds shift magnitude for severely-underestimating.
    pub severe_shift: f64,
    /// `(sensitivity, specificity)` of the highly-sensitive binary test.
    pub sensitive: (f64, f64),
    /// `(sensitivity, specificity)` of the highly-specific binary test.
    pub specific: (f64, f64),
}

impl Default for ArchetypeParams {
    fn default() -> Self {
        Self {
            shift: 0.75,
            severe_shift: 2.5,
            sensitive: (0.95, 0.5),
            specific: (0.5, 0.95),
        }
    }
}

impl ArchetypeParams {
    pub fn validate(&self) -> Result<()> {
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;
        if !finite_nonneg(self.shift) || !finite_nonneg(self.severe_shift) {
            return Err(Error::InvalidParameter(
                "shift magnitudes must be finite and nonnegative".to_string(),
            ));
        }
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        for (sens, spec) in [self.sensitive, self.specific] {
            if !unit(sens) || !unit(spec) {
                return Err(Error::InvalidParameter(
                    "sensitivity and specificity must lie in [0, 1]".to_string(),
                ));
            }
        }
        Ok(())
    }
}

fn shifted(risk: &[f64], delta: f64) -> Vec<f64> {
    risk.iter()
        .map(|&r| {
            if r <= 0.0 || r >= 1.0 {
                r
            } else {
                sigmoid(logit(r) + delta)
            }
        })
        .collect()
}

/// Binary test flagging exactly `round(sens·n_pos)` positives and
/// `round((1−spec)·n_neg)` negatives, chosen uniformly at random.
fn binary_test(labels: &[bool], (sens, spec): (f64, f64), rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut pos: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let mut neg: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    pos.shuffle(rng);
    neg.shuffle(rng);
    let mut scores = vec![0.0; labels.len()];
    let flagged_pos = (sens * pos.len() as f64).round() as usize;
    let flagged_neg = ((1.0 - spec) * neg.len() as f64).round() as usize;
    for &i in pos[..flagged_pos].iter().chain(&neg[..flagged_neg]) {
        scores[i] = 1.0;
    }
    scores
}

/// Scores of one archetype on the cohort.
///
/// The binary tests draw from a generator seeded by the cohort seed and the
/// archetype, so results do not depend on evaluation order.
pub fn apply_archetype(
    cohort: &Cohort,
    archetype: Archetype,
    params: &ArchetypeParams,
) -> Result<LabeledScores> {
    params.validate()?;
    let scores = match archetype {
        Archetype::WellCalibrated => cohort.risk.clone(),
        Archetype::Underestimating => shifted(&cohort.risk, -params.shift),
        Archetype::SeverelyUnderestimating => shifted(&cohort.risk, -params.severe_shift),
        Archetype::Overestimating => shifted(&cohort.risk, params.shift),
        Archetype::HighlySensitive | Archetype::HighlySpecific => {
            let stream = archetype as u64 + 1;
            let mut rng = ChaCha8Rng::seed_from_u64(cohort.seed);
            rng.set_stream(stream);
            let op = if archetype == Archetype::HighlySensitive {
                params.sensitive
            } else {
                params.specific
            };
            binary_test(&cohort.labels, op, &mut rng)
        }
        Archetype::AssumeAllPositive => vec![1.0; cohort.len()],
        Archetype::AssumeAllNegative => vec![0.0; cohort.len()],
    };
    LabeledScores::new(
        cohort
            .labels
            .iter()
            .zip(scores)
            .map(|(&label, score)| Observation { label, score })
            .collect(),
    )
}

/// One archetype's metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub archetype: Archetype,
    pub auc_roc: f64,
    pub brier: f64,
    /// Net benefit at 5%, 10% and 20%.
    pub net_benefit: [f64; 3],
    pub bounded_brier: f64,
    pub bounded_net_benefit: f64,
}

/// Metrics for all archetypes, sorted by NB@5% descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkTable {
    pub n: usize,
    pub seed: u64,
    /// Empirical prevalence of the cohort.
    pub prevalence: f64,
    pub params: ArchetypeParams,
    pub rows: Vec<BenchmarkRow>,
}

/// Benchmark configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkConfig {
    pub n: usize,
    pub prevalence: f64,
    pub seed: u64,
    pub concentration: f64,
    pub params: ArchetypeParams,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            n: 100_000,
            prevalence: 0.2,
            seed: 0,
            concentration: CONCENTRATION,
            params: ArchetypeParams::default(),
        }
    }
}

pub fn evaluate(d: &LabeledScores, archetype: Archetype) -> Result<BenchmarkRow> {
    let mut nb = [0.0; 3];
    for (slot, &tau) in nb.iter_mut().zip(&NB_THRESHOLDS) {
        *slot = net_benefit(d, tau)?;
    }
    Ok(BenchmarkRow {
        archetype,
        auc_roc: auc_roc(d)?,
        brier: brier(d),
        net_benefit: nb,
        bounded_brier: bounded_brier(d, bounded_range()),
        bounded_net_benefit: bounded_net_benefit(d, bounded_range())?,
    })
}

pub fn benchmark_table(config: &BenchmarkConfig) -> Result<BenchmarkTable> {
    config.params.validate()?;
    let cohort = generate_cohort_with(
        config.n,
        config.prevalence,
        config.seed,
        config.concentration,
    )?;
    let rows = std::thread::scope(|scope| {
        let handles: Vec<_> = Archetype::ALL
            .iter()
            .map(|&a| {
                let cohort = &cohort;
                scope.spawn(move || evaluate(&apply_archetype(cohort, a, &config.params)?, a))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("archetype worker panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    let mut rows = rows;
    rows.sort_by(|x, y| {
        y.net_benefit[0]
            .total_cmp(&x.net_benefit[0])
            .then(x.archetype.cmp(&y.archetype))
    });
    Ok(BenchmarkTable {
        n: config.n,
        seed: config.seed,
        prevalence: cohort.prevalence(),
        params: config.params,
        rows,
    })
}

/// Exact table values of the constant archetypes at prevalence `pi`.
pub fn analytic_row(archetype: Archetype, pi: f64) -> Option<BenchmarkRow> {
    let iv = bounded_range();
    let (a, b) = (iv.a(), iv.b());
    match archetype {
        Archetype::AssumeAllNegative => Some(BenchmarkRow {
            archetype,
            auc_roc: 0.5,
            brier: pi,
            net_benefit: [0.0; 3],
            // 2/(b−a)·π·∫(1−c)dc
            bounded_brier: pi * (2.0 - a - b),
            bounded_net_benefit: 0.0,
        }),
        Archetype::AssumeAllPositive => Some(BenchmarkRow {
            archetype,
            auc_roc: 0.5,
            brier: 1.0 - pi,
            net_benefit: NB_THRESHOLDS.map(|t| treat_all_net_benefit(pi, t)),
            bounded_brier: (1.0 - pi) * (a + b),
            bounded_net_benefit: pi
                - (1.0 - pi) * (((b - a) / (1.0 - b)).ln_1p() - (b - a)) / (b - a),
        }),
        _ => None,
    }
}

/// Orderings compared by the ordering-agreement check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingCheck {
    /// Archetypes by NB@5%, best first.
    pub by_net_benefit: Vec<Archetype>,
    /// Archetypes by bounded Brier, best first.
    pub by_bounded_brier: Vec<Archetype>,
    pub agrees: bool,
}

/// Compare the NB@5% and bounded-Brier rankings, leaving out
/// assume-all-positive.
pub fn ordering_check(table: &BenchmarkTable) -> OrderingCheck {
    let mut rows: Vec<&BenchmarkRow> = table
        .rows
        .iter()
        .filter(|r| r.archetype != Archetype::AssumeAllPositive)
        .collect();
    rows.sort_by(|x, y| {
        y.net_benefit[0]
            .total_cmp(&x.net_benefit[0])
            .then(x.archetype.cmp(&y.archetype))
    });
    let by_net_benefit: Vec<Archetype> = rows.iter().map(|r| r.archetype).collect();
    rows.sort_by(|x, y| {
        x.bounded_brier
            .total_cmp(&y.bounded_brier)
            .then(x.archetype.cmp(&y.archetype))
    });
    let by_bounded_brier: Vec<Archetype> = rows.iter().map(|r| r.archetype).collect();
    OrderingCheck {
        agrees: by_net_benefit == by_bounded_brier,
        by_net_benefit,
        by_bounded_brier,
    }
}

impl BenchmarkTable {
    pub fn row(&self, archetype: Archetype) -> Option<&BenchmarkRow> {
        self.rows.iter().find(|r| r.archetype == archetype)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "n = {}, seed = {}, prevalence = {:.4}",
            self.n, self.seed, self.prevalence
        )?;
        writeln!(
            out,
            "{:<26} {:>8} {:>8} {:>8} {:>8} {:>8} {:>14}",
            "archetype", "auc", "brier", "nb@5%", "nb@10%", "nb@20%", "bbrier[5,20]%"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{:<26} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>14.4}",
                r.archetype.name(),
                r.auc_roc,
                r.brier,
                r.net_benefit[0],
                r.net_benefit[1],
                r.net_benefit[2],
                r.bounded_brier
            )?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::InvalidParameter(format!("{other:?}")),
        };
        w.write_record([
            "archetype",
            "auc_roc",
            "brier",
            "nb_5",
            "nb_10",
            "nb_20",
            "bounded_brier_5_20",
            "bounded_net_benefit_5_20",
        ])
        .map_err(io)?;
        for r in &self.rows {
            w.write_record([
                r.archetype.name().to_string(),
                r.auc_roc.to_string(),
                r.brier.to_string(),
                r.net_benefit[0].to_string(),
                r.net_benefit[1].to_string(),
                r.net_benefit[2].to_string(),
                r.bounded_brier.to_string(),
                r.bounded_net_benefit.to_string(),
            ])
            .map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cohort_is_seeded() {
        let a = generate_cohort(1000, 0.2, 7).unwrap();
        let b = generate_cohort(1000, 0.2, 7).unwrap();
        let c = generate_cohort(1000, 0.2, 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.risk, c.risk);
    }

    #[test]
    fn cohort_prevalence() {
        let c = generate_cohort(100_000, 0.2, 0).unwrap();
        assert!((c.prevalence() - 0.2).abs() < 0.005, "{}", c.prevalence());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_cohort(0, 0.2, 0).is_err());
        assert!(generate_cohort(10, 1.0, 0).is_err());
        let params = ArchetypeParams {
            shift: -1.0,
            ..ArchetypeParams::default()
        };
        assert!(params.validate().is_err());
    }

    #[test]
    fn binary_operating_points_are_exact() {
        let c = generate_cohort(10_000, 0.2, 3).unwrap();
        let d =
            apply_archetype(&c, Archetype::HighlySensitive, &ArchetypeParams::default()).unwrap();
        let n_pos = d.n_pos();
        let tp = d
            .rows()
            .iter()
            .filter(|r| r.label && r.score == 1.0)
            .count();
        assert_eq!(tp, (0.95 * n_pos as f64).round() as usize);
        let again =
            apply_archetype(&c, Archetype::HighlySensitive, &ArchetypeParams::default()).unwrap();
        assert_eq!(d, again);
    }

    #[test]
    fn constant_archetypes() {
        let c = generate_cohort(5000, 0.2, 1).unwrap();
        let pi = c.prevalence();
        let neg = apply_archetype(
            &c,
            Archetype::AssumeAllNegative,
            &ArchetypeParams::default(),
        )
        .unwrap();
        assert!((brier(&neg) - pi).abs() < 1e-12);
        let pos = apply_archetype(
            &c,
            Archetype::AssumeAllPositive,
            &ArchetypeParams::default(),
        )
        .unwrap();
        assert!((brier(&pos) - (1.0 - pi)).abs() < 1e-12);
    }

    #[test]
    fn analytic_rows_match_table_formulas() {
        let neg = analytic_row(Archetype::AssumeAllNegative, 0.2).unwrap();
        assert!((neg.bounded_brier - 0.35).abs() < 1e-12);
        let pos = analytic_row(Archetype::AssumeAllPositive, 0.2).unwrap();
        assert!((pos.bounded_brier - 0.20).abs() < 1e-12);
        assert!((pos.net_benefit[0] - 0.158).abs() < 1e-3);
        assert!((pos.net_benefit[1] - 0.111).abs() < 1e-3);
        assert!(pos.net_benefit[2].abs() < 1e-15);
        assert!(analytic_row(Archetype::WellCalibrated, 0.2).is_none());
    }

    #[test]
    fn table_is_sorted_by_nb5() {
        let t = benchmark_table(&BenchmarkConfig {
            n: 2000,
            ..BenchmarkConfig::default()
        })
        .unwrap();
        assert_eq!(t.rows.len(), 8);
        assert!(t
            .rows
            .windows(2)
            .all(|w| w[0].net_benefit[0] >= w[1].net_benefit[0]));
        let mut text = Vec::new();
        t.write_text(&mut text).unwrap();
        assert_eq!(String::from_utf8(text).unwrap().lines().count(), 10);
    }
}
