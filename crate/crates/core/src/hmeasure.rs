//! H-measures: normalized weighted averages of minimal regret, and per-cost
//! model rankings.

use serde::{Deserialize, Serialize};

use crate::dataset::LabeledScores;
use crate::error::{Error, Result};
use crate::interval::ThresholdInterval;
use crate::regret::{CostRatio, RegretCurve, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    UniformC,
    LogOddsUniform,
    Beta,
}

/// Weight distribution over cost ratios for [`h_measure`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub kind: WeightKind,
    pub alpha: f64,
    pub beta_param: f64,
    /// Restrict the average to this range; `None` means `(0, 1)`.
    pub interval: Option<ThresholdInterval>,
    /// Positive constant multiplying the weight. Cancels in the normalization.
    pub scale: f64,
}

impl WeightSpec {
    pub fn uniform() -> Self {
        Self {
            kind: WeightKind::UniformC,
            alpha: 1.0,
            beta_param: 1.0,
            interval: None,
            scale: 1.0,
        }
    }

    pub fn log_odds(interval: ThresholdInterval) -> Self {
        Self {
            kind: WeightKind::LogOddsUniform,
            interval: Some(interval),
            ..Self::uniform()
        }
    }

    pub fn beta(alpha: f64, beta: f64) -> Self {
        Self {
            kind: WeightKind::Beta,
            alpha,
            beta_param: beta,
            ..Self::uniform()
        }
    }

    pub fn over(mut self, interval: ThresholdInterval) -> Self {
        self.interval = Some(interval);
        self
    }

    pub fn scaled(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    fn weight(&self) -> Result<Weight> {
        match self.kind {
            WeightKind::UniformC => Ok(Weight::Uniform),
            WeightKind::LogOddsUniform => Ok(Weight::LogOdds),
            WeightKind::Beta => Weight::beta(self.alpha, self.beta_param),
        }
    }
}

/// `∫ w·R* / ∫ w` over the weight's interval.
pub fn h_measure(d: &LabeledScores, spec: &WeightSpec) -> Result<f64> {
    h_measure_of_curve(&RegretCurve::new(d), spec)
}

/// [`h_measure`] on a precomputed curve.
pub fn h_measure_of_curve(curve: &RegretCurve, spec: &WeightSpec) -> Result<f64> {
    if !(spec.scale > 0.0 && spec.scale.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "weight scale must be positive, got {}",
            spec.scale
        )));
    }
    let weight = spec.weight()?;
    let interval = spec.interval.unwrap_or_else(ThresholdInterval::unit);
    let numerator = spec.scale * curve.integrate(interval, weight)?;
    let denominator = spec.scale * weight.total(interval)?;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::InvalidParameter(
            "weight has no mass on the interval".to_string(),
        ));
    }
    Ok(numerator / denominator)
}

/// 99 cost ratios `0.01, 0.02, …, 0.99`.
pub fn default_grid() -> Vec<CostRatio> {
    (1..=99)
        .map(|i| CostRatio::new(i as f64 / 100.0).expect("interior"))
        .collect()
}

/// Models ordered by `R*(c)` at each grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingTable {
    pub grid: Vec<f64>,
    /// `regret[k][m]` is `R*` of model `m` at `grid[k]`.
    pub regret: Vec<Vec<f64>>,
    /// `order[k]` lists model indices from best to worst at `grid[k]`.
    pub order: Vec<Vec<usize>>,
}

impl RankingTable {
    /// 1-based rank of `model` at grid index `k`.
    pub fn rank(&self, k: usize, model: usize) -> usize {
        self.order[k]
            .iter()
            .position(|&m| m == model)
            .expect("model index")
            + 1
    }

    /// Per-model rank at every grid point.
    pub fn ranks_of(&self, model: usize) -> Vec<usize> {
        (0..self.grid.len()).map(|k| self.rank(k, model)).collect()
    }
}

/// Rank models scored on the same rows by ascending `R*(c)`; ties go to the
/// lower model index.
pub fn rank_models(models: &[LabeledScores], grid: &[CostRatio]) -> Result<RankingTable> {
    let first = models
        .first()
        .ok_or_else(|| Error::InvalidParameter("no models to rank".to_string()))?;
    if models[1..].iter().any(|m| !m.labels().eq(first.labels())) {
        return Err(Error::LabelMismatch);
    }
    let curves: Vec<RegretCurve> = models.iter().map(RegretCurve::new).collect();
    let grid: Vec<f64> = grid.iter().map(|c| c.value()).collect();
    let regret: Vec<Vec<f64>> = grid
        .iter()
        .map(|&c| curves.iter().map(|curve| curve.eval(c)).collect())
        .collect();
    let order = regret
        .iter()
        .map(|row: &Vec<f64>| {
            let mut idx: Vec<usize> = (0..row.len()).collect();
            idx.sort_by(|&i, &j| row[i].total_cmp(&row[j]));
            idx
        })
        .collect();
    Ok(RankingTable {
        grid,
        regret,
        order,
    })
}
