//! Decision curve analysis: net benefit, its bounded average and the
//! rescaled decision curves whose areas are scoring rules.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledScores;
use crate::error::{Error, Result};
use crate::interval::ThresholdInterval;
use crate::quadrature;

/// Number of uniform samples added to the score breakpoints of a curve.
pub const GRID_POINTS: usize = 512;

fn require_threshold(tau: f64) -> Result<()> {
    if tau > 0.0 && tau < 1.0 {
        Ok(())
    } else {
        Err(Error::ThresholdAtBoundary(tau))
    }
}

/// Net benefit of treating rows with `s ≥ τ`:
/// `TP/n − FP/n · τ/(1−τ)`.
pub fn net_benefit(d: &LabeledScores, tau: f64) -> Result<f64> {
    require_threshold(tau)?;
    Ok(NetBenefit::new(d).at(tau))
}

/// Net benefit of treating everyone: `π − (1−π)·τ/(1−τ)`.
pub fn treat_all_net_benefit(prevalence: f64, tau: f64) -> f64 {
    prevalence - (1.0 - prevalence) * tau / (1.0 - tau)
}

/// Net benefit evaluator over sorted scores, `O(log n)` per threshold.
#[derive(Debug, Clone)]
pub struct NetBenefit {
    scores: Vec<f64>,
    // positives and negatives with score ≥ scores[k]
    pos_at_or_above: Vec<usize>,
    neg_at_or_above: Vec<usize>,
    n: f64,
    prevalence: f64,
}

impl NetBenefit {
    pub fn new(d: &LabeledScores) -> Self {
        let groups = d.score_groups();
        let mut pos = vec![0; groups.len() + 1];
        let mut neg = vec![0; groups.len() + 1];
        for (k, g) in groups.iter().enumerate().rev() {
            pos[k] = pos[k + 1] + g.positives;
            neg[k] = neg[k + 1] + g.negatives;
        }
        Self {
            scores: groups.iter().map(|g| g.score).collect(),
            pos_at_or_above: pos,
            neg_at_or_above: neg,
            n: d.len() as f64,
            prevalence: d.prevalence(),
        }
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence
    }

    /// Distinct scores, ascending.
    pub fn breakpoints(&self) -> &[f64] {
        &self.scores
    }

    /// Net benefit at `tau ∈ (0, 1)`; not range-checked.
    pub fn at(&self, tau: f64) -> f64 {
        let k = self.scores.partition_point(|&s| s < tau);
        let tp = self.pos_at_or_above[k] as f64 / self.n;
        let fp = self.neg_at_or_above[k] as f64 / self.n;
        tp - fp * tau / (1.0 - tau)
    }
}

/// Pointwise loss whose clipped difference gives the bounded net benefit.
fn nb_loss(x: f64, y: f64) -> f64 {
    if y == 1.0 {
        1.0 - x
    } else {
        (1.0 - x) - (-x).ln_1p()
    }
}

/// Mean net benefit over thresholds uniform on `[a, b]`:
/// `π − (E L(clip s, y) − E L(clip y, y)) / (b − a)`.
pub fn bounded_net_benefit(d: &LabeledScores, interval: ThresholdInterval) -> Result<f64> {
    interval.require_interior()?;
    let excess = d
        .rows()
        .iter()
        .map(|r| nb_loss(interval.clip(r.score), r.y()) - nb_loss(interval.clip(r.y()), r.y()))
        .sum::<f64>()
        / d.len() as f64;
    Ok(d.prevalence() - excess / interval.width())
}

/// Sorted, deduplicated sample thresholds: the score breakpoints inside the
/// interval plus `points` uniform samples spanning it.
pub fn threshold_grid(breakpoints: &[f64], interval: ThresholdInterval, points: usize) -> Vec<f64> {
    let (a, b) = (interval.a(), interval.b());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| {
            if points == 1 {
                a
            } else {
                a + (b - a) * i as f64 / (points - 1) as f64
            }
        })
        .collect();
    grid.extend(breakpoints.iter().copied().filter(|&s| s >= a && s <= b));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Net benefit sampled over a threshold range with the reference policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionCurve {
    pub thresholds: Vec<f64>,
    pub net_benefit: Vec<f64>,
    pub treat_all: Vec<f64>,
    pub prevalence: f64,
}

impl DecisionCurve {
    /// The treat-none reference, identically zero.
    pub fn treat_none(&self) -> Vec<f64> {
        vec![0.0; self.thresholds.len()]
    }
}

/// Decision curve of `d` on a breakpoint-refined grid over `interval`.
pub fn decision_curve(d: &LabeledScores, interval: ThresholdInterval) -> Result<DecisionCurve> {
    interval.require_interior()?;
    let nb = NetBenefit::new(d);
    let thresholds = threshold_grid(nb.breakpoints(), interval, GRID_POINTS);
    Ok(DecisionCurve {
        net_benefit: thresholds.iter().map(|&t| nb.at(t)).collect(),
        treat_all: thresholds
            .iter()
            .map(|&t| treat_all_net_benefit(nb.prevalence(), t))
            .collect(),
        thresholds,
        prevalence: nb.prevalence(),
    })
}

/// Reparameterization of the threshold axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rescale {
    /// `φ(c) = −(1−c)²/2`
    Quadratic,
    /// `φ(c) = ln c`
    Logarithmic,
}

impl Rescale {
    pub fn forward(self, c: f64) -> f64 {
        match self {
            Rescale::Quadratic => -0.5 * (1.0 - c) * (1.0 - c),
            Rescale::Logarithmic => c.ln(),
        }
    }

    pub fn inverse(self, x: f64) -> f64 {
        match self {
            Rescale::Quadratic => 1.0 - (-2.0 * x).sqrt(),
            Rescale::Logarithmic => x.exp(),
        }
    }

    /// Width the raw area is divided by: `b − a` for quadratic, the log-odds
    /// width for logarithmic.
    pub fn normalizer(self, interval: ThresholdInterval) -> f64 {
        match self {
            Rescale::Quadratic => interval.width(),
            Rescale::Logarithmic => interval.log_odds_width().expect("interior interval"),
        }
    }
}

/// Decision curve plotted against `φ(τ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledDecisionCurve {
    pub rescale: Rescale,
    pub thresholds: Vec<f64>,
    /// `φ(τ)` at each threshold.
    pub x: Vec<f64>,
    pub net_benefit: Vec<f64>,
    /// `π − NB(τ)`.
    pub shortfall: Vec<f64>,
    pub prevalence: f64,
    /// Area between the curve and `π` on the rescaled axis, normalized.
    pub area: f64,
}

/// Normalized area between `NB` and `π` over `interval` on the `φ` axis,
/// integrated numerically between consecutive score breakpoints.
pub fn rescaled_area(
    nb: &NetBenefit,
    interval: ThresholdInterval,
    rescale: Rescale,
) -> Result<f64> {
    interval.require_interior()?;
    let pi = nb.prevalence();
    let mut cuts: Vec<f64> = vec![interval.a()];
    cuts.extend(
        nb.breakpoints()
            .iter()
            .copied()
            .filter(|&s| s > interval.a() && s < interval.b()),
    );
    cuts.push(interval.b());
    let cuts: Vec<f64> = cuts.into_iter().map(|c| rescale.forward(c)).collect();
    let raw = quadrature::integrate_piecewise(|x| pi - nb.at(rescale.inverse(x)), &cuts, 1e-12);
    Ok(raw / rescale.normalizer(interval))
}

/// Rescaled decision curve with its normalized area.
pub fn rescaled_decision_curve(
    d: &LabeledScores,
    interval: ThresholdInterval,
    rescale: Rescale,
) -> Result<RescaledDecisionCurve> {
    interval.require_interior()?;
    let nb = NetBenefit::new(d);
    let thresholds = threshold_grid(nb.breakpoints(), interval, GRID_POINTS);
    let net_benefit: Vec<f64> = thresholds.iter().map(|&t| nb.at(t)).collect();
    Ok(RescaledDecisionCurve {
        rescale,
        x: thresholds.iter().map(|&t| rescale.forward(t)).collect(),
        shortfall: net_benefit.iter().map(|v| nb.prevalence() - v).collect(),
        net_benefit,
        thresholds,
        prevalence: nb.prevalence(),
        area: rescaled_area(&nb, interval, rescale)?,
    })
}
