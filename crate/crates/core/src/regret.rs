//! Pointwise regret, the exact minimal-regret curve and its weighted integrals.
//!
//! A score `s ≥ τ` is a positive prediction. With a false positive costing `c`
//! and a false negative costing `1−c`, the regret of threshold `τ` is
//! `c·(1−π)·(1−F0(τ)) + (1−c)·π·F1(τ)` where `F(τ) = P(s < τ)` within a class.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::dataset::LabeledScores;
use crate::error::{Error, Result};
use crate::interval::{logit, ThresholdInterval};

/// A cost ratio strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostRatio(f64);

impl CostRatio {
    pub fn new(c: f64) -> Result<Self> {
        if c > 0.0 && c < 1.0 {
            Ok(Self(c))
        } else {
            Err(Error::ThresholdAtBoundary(c))
        }
    }

    /// Cost ratio whose odds are `fp:fn`, i.e. `fp / (fp + fn)`.
    pub fn from_odds(fp: f64, fn_: f64) -> Result<Self> {
        if !(fp > 0.0 && fn_ > 0.0 && fp.is_finite() && fn_.is_finite()) {
            return Err(Error::InvalidParameter(format!("odds {fp}:{fn_}")));
        }
        Self::new(fp / (fp + fn_))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Rows predicted wrong at threshold `tau`: `(false positives, false negatives)`.
pub fn error_counts(d: &LabeledScores, tau: f64) -> (usize, usize) {
    d.rows().iter().fold((0, 0), |(fp, fn_), r| {
        let positive = r.score >= tau;
        (
            fp + usize::from(positive && !r.label),
            fn_ + usize::from(!positive && r.label),
        )
    })
}

/// Expected regret of acting at threshold `tau` under cost ratio `c`.
pub fn regret(d: &LabeledScores, c: f64, tau: f64) -> f64 {
    let (fp, fn_) = error_counts(d, tau);
    let n = d.len() as f64;
    c * (fp as f64 / n) + (1.0 - c) * (fn_ as f64 / n)
}

/// Regret at the cost-matched threshold `τ = c`, evaluated directly.
pub fn minimal_regret(d: &LabeledScores, c: f64) -> f64 {
    regret(d, c, c)
}

/// Fraction of rows classified correctly at threshold `tau`.
pub fn accuracy(d: &LabeledScores, tau: f64) -> f64 {
    let (fp, fn_) = error_counts(d, tau);
    (d.len() - fp - fn_) as f64 / d.len() as f64
}

/// Build the exact minimal-regret curve of `d`.
pub fn minimal_regret_curve(d: &LabeledScores) -> RegretCurve {
    RegretCurve::new(d)
}

/// Distribution over cost ratios used to average regret.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Weight {
    /// Constant density in `c`.
    Uniform,
    /// `1 / (c·(1−c))`: uniform on the log-odds axis.
    LogOdds,
    /// `1 / (1−c)`, the weight that turns regret into net benefit.
    InverseOneMinus,
    /// Beta(α, β) density.
    Beta { alpha: f64, beta: f64 },
}

impl Weight {
    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        let w = Weight::Beta { alpha, beta };
        w.validate()?;
        Ok(w)
    }

    fn validate(&self) -> Result<()> {
        if let Weight::Beta { alpha, beta } = *self {
            if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "beta parameters must be positive, got ({alpha}, {beta})"
                )));
            }
        }
        Ok(())
    }

    /// Density at `c` (unnormalized for the non-Beta kinds).
    pub fn density(&self, c: f64) -> f64 {
        match *self {
            Weight::Uniform => 1.0,
            Weight::LogOdds => 1.0 / (c * (1.0 - c)),
            Weight::InverseOneMinus => 1.0 / (1.0 - c),
            Weight::Beta { alpha, beta } => {
                let ln_b = statrs::function::beta::ln_beta(alpha, beta);
                ((alpha - 1.0) * c.ln() + (beta - 1.0) * (1.0 - c).ln() - ln_b).exp()
            }
        }
    }

    fn check_integrable(&self, interval: ThresholdInterval) -> Result<()> {
        self.validate()?;
        let (a, b) = (interval.a(), interval.b());
        let diverges = match self {
            Weight::LogOdds => a <= 0.0 || b >= 1.0,
            Weight::InverseOneMinus => b >= 1.0,
            Weight::Uniform | Weight::Beta { .. } => false,
        };
        if diverges {
            Err(Error::NonIntegrable { a, b })
        } else {
            Ok(())
        }
    }

    /// `∫_a^b w(c) dc`.
    pub fn total(&self, interval: ThresholdInterval) -> Result<f64> {
        self.check_integrable(interval)?;
        let (a, b) = (interval.a(), interval.b());
        Ok(match *self {
            Weight::Uniform => b - a,
            Weight::LogOdds => logit(b) - logit(a),
            Weight::InverseOneMinus => ((b - a) / (1.0 - b)).ln_1p(),
            Weight::Beta { alpha, beta } => beta_reg(alpha, beta, b) - beta_reg(alpha, beta, a),
        })
    }

    /// `∫_{x0}^{x1} w(c)·(u + v·c) dc` in closed form; the caller has checked
    /// integrability.
    fn affine_integral(&self, u: f64, v: f64, x0: f64, x1: f64) -> f64 {
        if x1 <= x0 {
            return 0.0;
        }
        match *self {
            Weight::Uniform => u * (x1 - x0) + v * 0.5 * (x1 * x1 - x0 * x0),
            Weight::LogOdds => {
                // u·ln c − (u+v)·ln(1−c)
                let ln_c = ((x1 - x0) / x0).ln_1p();
                let ln_one_minus = ((x1 - x0) / (1.0 - x1)).ln_1p();
                u * ln_c + (u + v) * ln_one_minus
            }
            Weight::InverseOneMinus => {
                // −(u+v)·ln(1−c) − v·c
                (u + v) * ((x1 - x0) / (1.0 - x1)).ln_1p() - v * (x1 - x0)
            }
            Weight::Beta { alpha, beta } => {
                let mass = beta_reg(alpha, beta, x1) - beta_reg(alpha, beta, x0);
                let first = beta_reg(alpha + 1.0, beta, x1) - beta_reg(alpha + 1.0, beta, x0);
                u * mass + v * alpha / (alpha + beta) * first
            }
        }
    }
}

/// Affine piece of the regret curve: `R*(c) = intercept + slope·c` on `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    pub fn eval(&self, c: f64) -> f64 {
        self.intercept + self.slope * c
    }
}

/// Exact minimal-regret curve `R*(c)` as contiguous affine segments.
///
/// Knots are `0`, every distinct score strictly inside `(0, 1)`, and `1`.
/// On `(knot_k, knot_{k+1}]` the false-positive and false-negative rates are
/// constant, so `R*` is affine there.
#[derive(Debug, Clone, PartialEq)]
pub struct RegretCurve {
    knots: Vec<f64>,
    slopes: Vec<f64>,
    intercepts: Vec<f64>,
    prevalence: f64,
}

impl RegretCurve {
    pub fn new(d: &LabeledScores) -> Self {
        let groups = d.score_groups();
        let n = d.len() as f64;
        let mut knots = vec![0.0];
        knots.extend(
            groups
                .iter()
                .map(|g| g.score)
                .filter(|&s| s > 0.0 && s < 1.0),
        );
        knots.push(1.0);

        let mut slopes = Vec::with_capacity(knots.len() - 1);
        let mut intercepts = Vec::with_capacity(knots.len() - 1);
        let mut g = 0;
        let (mut pos_at_or_below, mut neg_at_or_below) = (0usize, 0usize);
        for &knot in &knots[..knots.len() - 1] {
            while g < groups.len() && groups[g].score <= knot {
                pos_at_or_below += groups[g].positives;
                neg_at_or_below += groups[g].negatives;
                g += 1;
            }
            let fp_rate = (d.n_neg() - neg_at_or_below) as f64 / n;
            let fn_rate = pos_at_or_below as f64 / n;
            slopes.push(fp_rate - fn_rate);
            intercepts.push(fn_rate);
        }
        Self {
            knots,
            slopes,
            intercepts,
            prevalence: d.prevalence(),
        }
    }

    /// `0`, the distinct interior scores, then `1`.
    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn prevalence(&self) -> f64 {
        self.prevalence
    }

    pub fn segments(&self) -> impl ExactSizeIterator<Item = Segment> + '_ {
        (0..self.slopes.len()).map(move |k| Segment {
            lo: self.knots[k],
            hi: self.knots[k + 1],
            slope: self.slopes[k],
            intercept: self.intercepts[k],
        })
    }

    /// Segment index covering `c`; `c ≤ 0` maps to the first segment.
    fn segment_index(&self, c: f64) -> usize {
        self.knots
            .partition_point(|&k| k < c)
            .saturating_sub(1)
            .min(self.slopes.len() - 1)
    }

    /// `R*(c)` for `c ∈ [0, 1]`; at `c = 0` this is the right limit.
    pub fn eval(&self, c: f64) -> f64 {
        let k = self.segment_index(c);
        self.intercepts[k] + self.slopes[k] * c
    }

    /// `∫_a^b w(c)·R*(c) dc`, exact per segment.
    pub fn integrate(&self, interval: ThresholdInterval, weight: Weight) -> Result<f64> {
        weight.check_integrable(interval)?;
        let (a, b) = (interval.a(), interval.b());
        Ok(self
            .segments()
            .filter(|s| s.hi > a && s.lo < b)
            .map(|s| weight.affine_integral(s.intercept, s.slope, s.lo.max(a), s.hi.min(b)))
            .sum())
    }

    /// Weighted mean of `R*` over the interval: integral over total weight.
    pub fn mean(&self, interval: ThresholdInterval, weight: Weight) -> Result<f64> {
        let total = weight.total(interval)?;
        if total.is_nan() || total <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "weight has no mass on [{}, {}]",
                interval.a(),
                interval.b()
            )));
        }
        Ok(self.integrate(interval, weight)? / total)
    }
}
