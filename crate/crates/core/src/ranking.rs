//! AUC-ROC, ROC curves and the regret form of AUC for calibrated scores.

use serde::{Deserialize, Serialize};

use crate::dataset::{LabeledScores, TieConvention};
use crate::error::{Error, Result};

fn require_both_classes(d: &LabeledScores) -> Result<()> {
    if d.n_pos() == 0 {
        Err(Error::DegenerateClass("positive"))
    } else if d.n_neg() == 0 {
        Err(Error::DegenerateClass("negative"))
    } else {
        Ok(())
    }
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn auc_roc(d: &LabeledScores) -> Result<f64> {
    require_both_classes(d)?;
    let mut neg_below = 0usize;
    let mut wins = 0.0;
    for g in d.score_groups() {
        wins += g.positives as f64 * (neg_below as f64 + 0.5 * g.negatives as f64);
        neg_below += g.negatives;
    }
    Ok(wins / (d.n_pos() as f64 * d.n_neg() as f64))
}

/// ROC staircase swept from the highest threshold down.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// `(false positive rate, true positive rate)` from `(0,0)` to `(1,1)`.
    pub points: Vec<(f64, f64)>,
    /// Threshold reached at each point; the first is `+∞`.
    pub thresholds: Vec<f64>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area under the points.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * (w[0].1 + w[1].1) * 0.5)
            .sum()
    }
}

pub fn roc_curve(d: &LabeledScores) -> Result<RocCurve> {
    require_both_classes(d)?;
    let (n_pos, n_neg) = (d.n_pos(), d.n_neg());
    let mut points = vec![(0.0, 0.0)];
    let mut thresholds = vec![f64::INFINITY];
    let (mut tp, mut fp) = (0usize, 0usize);
    for g in d.score_groups().iter().rev() {
        tp += g.positives;
        fp += g.negatives;
        points.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        thresholds.push(g.score);
    }
    Ok(RocCurve {
        points,
        thresholds,
        auc: auc_roc(d)?,
    })
}

/// Both sides of the regret representation of AUC.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandIdentity {
    pub auc: f64,
    /// Mean of `R*(s_i)` over rows, with mid-distribution CDFs.
    pub expected_regret: f64,
    /// `1 − expected_regret / (2π(1−π))`.
    pub regret_form: f64,
    /// `auc − regret_form`; near zero only for calibrated scores.
    pub gap: f64,
}

/// Compare AUC with `1 − E[R*(s)] / (2π(1−π))`.
pub fn hand_identity(d: &LabeledScores) -> Result<HandIdentity> {
    require_both_classes(d)?;
    let auc = auc_roc(d)?;
    let pi = d.prevalence();
    let cdfs = d.empirical_cdfs(TieConvention::MidDistribution);
    let f0 = cdfs.negative_cum().expect("negatives present");
    let f1 = cdfs.positive_cum().expect("positives present");
    let groups = d.score_groups();
    let total: f64 = groups
        .iter()
        .zip(f0.iter().zip(f1))
        .map(|(g, (&f0, &f1))| {
            let c = g.score;
            let r = c * (1.0 - pi) * (1.0 - f0) + (1.0 - c) * pi * f1;
            r * g.count() as f64
        })
        .sum();
    let expected_regret = total / d.len() as f64;
    let regret_form = 1.0 - expected_regret / (2.0 * pi * (1.0 - pi));
    Ok(HandIdentity {
        auc,
        expected_regret,
        regret_form,
        gap: auc - regret_form,
    })
}

/// `auc − (1 − E[R*(s)] / (2π(1−π)))`.
pub fn hand_identity_gap(d: &LabeledScores) -> Result<f64> {
    hand_identity(d).map(|h| h.gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(labels: &[u8], scores: &[f64]) -> LabeledScores {
        LabeledScores::from_pairs(labels, scores).unwrap()
    }

    #[test]
    fn auc_examples() {
        assert_eq!(
            auc_roc(&data(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9])).unwrap(),
            1.0
        );
        assert_eq!(auc_roc(&data(&[0, 1, 0, 1], &[0.5; 4])).unwrap(), 0.5);
        assert_eq!(auc_roc(&data(&[1, 0, 0, 0, 0], &[1.0; 5])).unwrap(), 0.5);
        assert_eq!(auc_roc(&data(&[1, 0], &[0.6, 0.4])).unwrap(), 1.0);
        assert!(matches!(
            auc_roc(&data(&[1, 1], &[0.1, 0.2])),
            Err(Error::DegenerateClass("negative"))
        ));
    }

    #[test]
    fn roc_examples() {
        let r = roc_curve(&data(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9])).unwrap();
        // the sweep goes through each distinct score
        assert_eq!(r.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(r.points.last(), Some(&(1.0, 1.0)));
        assert!(r.points.contains(&(0.0, 1.0)));
        assert_eq!(r.trapezoid_area(), 1.0);
        let tie = roc_curve(&data(&[0, 1], &[0.5, 0.5])).unwrap();
        assert_eq!(tie.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(tie.trapezoid_area(), 0.5);
    }

    #[test]
    fn hand_constant_half() {
        let h = hand_identity(&data(&[0, 1, 0, 1], &[0.5; 4])).unwrap();
        assert!((h.expected_regret - 0.25).abs() < 1e-15);
        assert!((h.regret_form - 0.5).abs() < 1e-15);
        assert!(h.gap.abs() < 1e-15);
    }

    #[test]
    fn hand_calibrated_groups() {
        let labels = [0, 0, 0, 0, 1, 0, 1, 1, 1, 1];
        let scores = [0.2, 0.2, 0.2, 0.2, 0.2, 0.8, 0.8, 0.8, 0.8, 0.8];
        let gap = hand_identity_gap(&data(&labels, &scores)).unwrap();
        assert!(gap.abs() < 1e-12, "gap {gap}");
    }

    #[test]
    fn hand_anti_calibrated() {
        let labels = [0, 0, 0, 0, 1, 0, 1, 1, 1, 1];
        let flipped = [0.8, 0.8, 0.8, 0.8, 0.8, 0.2, 0.2, 0.2, 0.2, 0.2];
        let gap = hand_identity_gap(&data(&labels, &flipped)).unwrap();
        assert!(gap.abs() > 0.25, "gap {gap}");
    }
}
