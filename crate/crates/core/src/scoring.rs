//! Proper scoring rules and their threshold-bounded and shifted variants.
//!
//! Logarithms are natural throughout, so log-loss values are in nats.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledScores;
use crate::error::{Error, Result};
use crate::interval::{logit, sigmoid, ThresholdInterval};
use crate::regret::Weight;

/// Mean squared error `E[(y − s)²]`.
pub fn brier(d: &LabeledScores) -> f64 {
    mean(d, |y, s| (y - s) * (y - s))
}

/// Pointwise negative log-likelihood of label `y` under forecast `s`.
pub fn log_loss_point(s: f64, y: f64) -> f64 {
    if y == 1.0 {
        -s.ln()
    } else {
        -(-s).ln_1p()
    }
}

/// Mean negative log-likelihood in nats.
///
/// With `clamp_epsilon`, scores are first clipped to `[ε, 1−ε]`. Without it a
/// confident wrong forecast makes the result `+∞`.
pub fn log_loss(d: &LabeledScores, clamp_epsilon: Option<f64>) -> f64 {
    match clamp_epsilon {
        Some(eps) => mean(d, |y, s| log_loss_point(s.clamp(eps, 1.0 - eps), y)),
        None => mean(d, |y, s| log_loss_point(s, y)),
    }
}

/// Brier score restricted to cost ratios in `[a, b]`:
/// `(E(y − clip s)² − E(y − clip y)²) / (b − a)`.
///
/// Equals twice the uniform average of `R*` over the interval, and the plain
/// Brier score on `[0, 1]`.
pub fn bounded_brier(d: &LabeledScores, interval: ThresholdInterval) -> f64 {
    let sq = |u: f64| u * u;
    mean(d, |y, s| {
        sq(y - interval.clip(s)) - sq(y - interval.clip(y))
    }) / interval.width()
}

/// `E ℓ(clip s, y) − E ℓ(clip y, y)`, the log-odds-weighted integral of `R*`
/// over `[a, b]`. Tends to the log loss as the interval widens to `(0, 1)`.
pub fn bounded_log_loss_integral(d: &LabeledScores, interval: ThresholdInterval) -> Result<f64> {
    interval.require_interior()?;
    Ok(mean(d, |y, s| {
        log_loss_point(interval.clip(s), y) - log_loss_point(interval.clip(y), y)
    }))
}

/// Log loss restricted to `[a, b]`: the log-odds-uniform average of `R*`.
pub fn bounded_log_loss(d: &LabeledScores, interval: ThresholdInterval) -> Result<f64> {
    let integral = bounded_log_loss_integral(d, interval)?;
    let width = interval.log_odds_width().expect("interior interval");
    Ok(integral / width)
}

/// Shift the log-odds of `s` by `−logit(μ)`; `0` and `1` are fixed points.
///
/// `score_adjustment(score_adjustment(s, μ), 1 − μ) == s`.
pub fn score_adjustment(s: f64, mu: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        sigmoid(logit(s) - logit(mu))
    }
}

/// Brier score of the adjusted scores `score_adjustment(s, μ)`.
///
/// This reweights the regret average toward cost ratios near `μ`.
pub fn shifted_brier(d: &LabeledScores, mu: f64) -> Result<f64> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "reference probability must lie in (0, 1), got {mu}"
        )));
    }
    let adjusted = d.map_scores(|s| score_adjustment(s, mu))?;
    Ok(brier(&adjusted))
}

fn mean(d: &LabeledScores, f: impl Fn(f64, f64) -> f64) -> f64 {
    d.rows().iter().map(|r| f(r.y(), r.score)).sum::<f64>() / d.len() as f64
}

/// How a metric weights cost ratios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weighting {
    UniformC,
    LogOddsUniform,
    Beta { alpha: f64, beta: f64 },
}

impl From<Weighting> for Weight {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::UniformC => Weight::Uniform,
            Weighting::LogOddsUniform => Weight::LogOdds,
            Weighting::Beta { alpha, beta } => Weight::Beta { alpha, beta },
        }
    }
}

/// A named metric value with the threshold range and weighting behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub metric: String,
    pub value: f64,
    pub interval: Option<ThresholdInterval>,
    pub weighting: Option<Weighting>,
}

impl ScoreReport {
    pub fn new(metric: impl Into<String>, value: f64) -> Self {
        Self {
            metric: metric.into(),
            value,
            interval: None,
            weighting: None,
        }
    }

    pub fn over(mut self, interval: ThresholdInterval) -> Self {
        self.interval = Some(interval);
        self
    }

    pub fn weighted(mut self, weighting: Weighting) -> Self {
        self.weighting = Some(weighting);
        self
    }
}

/// Metric whose implicit cost-ratio weighting is plotted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityKind {
    Brier,
    LogLoss,
    /// All weight at `c = ½`.
    AccuracyPoint,
    Beta {
        alpha: f64,
        beta: f64,
    },
}

/// Horizontal axis for a density plot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityAxis {
    CostRatio,
    LogOdds,
}

/// Sampled density of a metric's cost-ratio weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub axis: DensityAxis,
    pub x: Vec<f64>,
    pub density: Vec<f64>,
    /// Location of a point mass on this axis, if the weighting has one.
    pub point_mass: Option<f64>,
}

/// Sample the weighting density of `kind` at coordinates `xs` on `axis`.
///
/// On the log-odds axis the density carries the Jacobian `c·(1−c)`. Brier and
/// log loss use their unnormalized weights (`1` and `1/(c(1−c))` in `c`).
pub fn weighting_density(kind: DensityKind, axis: DensityAxis, xs: &[f64]) -> Result<DensityCurve> {
    if let DensityKind::Beta { alpha, beta } = kind {
        Weight::beta(alpha, beta)?;
    }
    let density = xs
        .iter()
        .map(|&x| {
            let (c, jacobian) = match axis {
                DensityAxis::CostRatio => (x, 1.0),
                DensityAxis::LogOdds => {
                    let c = sigmoid(x);
                    (c, c * (1.0 - c))
                }
            };
            if !(c > 0.0 && c < 1.0) {
                return 0.0;
            }
            let in_c = match kind {
                DensityKind::Brier => 1.0,
                DensityKind::LogLoss => 1.0 / (c * (1.0 - c)),
                DensityKind::AccuracyPoint => 0.0,
                DensityKind::Beta { alpha, beta } => Weight::Beta { alpha, beta }.density(c),
            };
            in_c * jacobian
        })
        .collect();
    let point_mass = matches!(kind, DensityKind::AccuracyPoint).then_some(match axis {
        DensityAxis::CostRatio => 0.5,
        DensityAxis::LogOdds => 0.0,
    });
    Ok(DensityCurve {
        axis,
        x: xs.to_vec(),
        density,
        point_mass,
    })
}
