//! Isotonic recalibration and calibration/refinement decompositions.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledScores;
use crate::scoring::{brier, log_loss};

/// Contiguous run of distinct scores pooled to one calibrated value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// Smallest and largest member score.
    pub lo: f64,
    pub hi: f64,
    /// Mean label of the members.
    pub value: f64,
    pub count: usize,
    pub positives: usize,
}

/// Least-squares isotonic regression of labels on scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsotonicFit {
    pub blocks: Vec<Block>,
    /// Calibrated value per row, in canonical (score) order.
    pub fitted: Vec<f64>,
}

impl IsotonicFit {
    /// Calibrated value per row in the dataset's input order.
    pub fn fitted_input_order(&self, d: &LabeledScores) -> Vec<f64> {
        let mut out = vec![0.0; self.fitted.len()];
        for (&row, &p) in d.canonical_order().iter().zip(&self.fitted) {
            out[row] = p;
        }
        out
    }

    /// Calibrated value for an arbitrary score: the block whose range covers
    /// it, or the nearest block below (the first block for smaller scores).
    pub fn predict(&self, s: f64) -> f64 {
        let k = self.blocks.partition_point(|b| b.lo <= s);
        self.blocks[k.saturating_sub(1)].value
    }
}

/// Pool Adjacent Violators with rows of equal score pooled up front.
pub fn pav_fit(d: &LabeledScores) -> IsotonicFit {
    let mut stack: Vec<Block> = Vec::new();
    for g in d.score_groups() {
        let mut cur = Block {
            lo: g.score,
            hi: g.score,
            value: 0.0,
            count: g.count(),
            positives: g.positives,
        };
        // merge while the previous block's mean exceeds the current one,
        // compared exactly as pos_prev/cnt_prev > pos_cur/cnt_cur
        while let Some(prev) = stack.last() {
            if prev.positives * cur.count > cur.positives * prev.count {
                cur = Block {
                    lo: prev.lo,
                    hi: cur.hi,
                    value: 0.0,
                    count: prev.count + cur.count,
                    positives: prev.positives + cur.positives,
                };
                stack.pop();
            } else {
                break;
            }
        }
        stack.push(cur);
    }
    for b in &mut stack {
        b.value = b.positives as f64 / b.count as f64;
    }
    let fitted = stack
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.value, b.count))
        .collect();
    IsotonicFit {
        blocks: stack,
        fitted,
    }
}

/// A metric split into calibration and refinement parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    /// Metric of the raw scores.
    pub total: f64,
    /// `total − refinement_term`.
    pub calibration_term: f64,
    /// Metric of the isotonic-recalibrated scores.
    pub refinement_term: f64,
    /// Direct divergence between scores and recalibrated values.
    pub divergence_term: f64,
    /// `total − divergence_term − refinement_term`.
    pub cross_residual: f64,
}

impl DecompositionReport {
    fn new(total: f64, refinement: f64, divergence: f64) -> Self {
        Self {
            total,
            calibration_term: total - refinement,
            refinement_term: refinement,
            divergence_term: divergence,
            cross_residual: total - divergence - refinement,
        }
    }
}

fn recalibrated(d: &LabeledScores, fit: &IsotonicFit) -> LabeledScores {
    d.with_scores(&fit.fitted_input_order(d))
        .expect("fitted values lie in [0, 1]")
}

/// Brier score split; `divergence_term` is `E(s − p)²`.
pub fn brier_decomposition(d: &LabeledScores) -> DecompositionReport {
    let fit = pav_fit(d);
    let divergence = d
        .canonical()
        .zip(&fit.fitted)
        .map(|(r, &p)| (r.score - p) * (r.score - p))
        .sum::<f64>()
        / d.len() as f64;
    DecompositionReport::new(brier(d), brier(&recalibrated(d, &fit)), divergence)
}

/// `KL(Bernoulli(p) ‖ Bernoulli(s))` with `0·ln 0 = 0`.
pub fn bernoulli_kl(p: f64, s: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    term(p, s) + term(1.0 - p, 1.0 - s)
}

/// Log-loss split; `divergence_term` is `E KL(p ‖ s)`.
pub fn log_loss_decomposition(d: &LabeledScores) -> DecompositionReport {
    let fit = pav_fit(d);
    let divergence = d
        .canonical()
        .zip(&fit.fitted)
        .map(|(r, &p)| bernoulli_kl(p, r.score))
        .sum::<f64>()
        / d.len() as f64;
    let refinement = log_loss(&recalibrated(d, &fit), None);
    DecompositionReport::new(log_loss(d, None), refinement, divergence)
}
