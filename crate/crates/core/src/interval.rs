use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[a, b]` of cost ratios with `0 ≤ a < b ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdInterval {
    a: f64,
    b: f64,
}

impl ThresholdInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b > 1.0 || a >= b {
            return Err(Error::InvalidInterval { a, b });
        }
        Ok(Self { a, b })
    }

    /// The whole unit interval.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn is_interior(&self) -> bool {
        self.a > 0.0 && self.b < 1.0
    }

    /// Fails with `IntervalAtBoundary` unless `0 < a < b < 1`.
    pub fn require_interior(&self) -> Result<()> {
        if self.is_interior() {
            Ok(())
        } else {
            Err(Error::IntervalAtBoundary {
                a: self.a,
                b: self.b,
            })
        }
    }

    /// Log-odds endpoints, defined only for interior intervals.
    pub fn log_odds(&self) -> Option<(f64, f64)> {
        self.is_interior().then(|| (logit(self.a), logit(self.b)))
    }

    /// Width of the interval on the log-odds axis.
    pub fn log_odds_width(&self) -> Option<f64> {
        self.log_odds().map(|(la, lb)| lb - la)
    }

    pub fn clip(&self, z: f64) -> f64 {
        z.clamp(self.a, self.b)
    }

    pub fn contains(&self, c: f64) -> bool {
        c >= self.a && c <= self.b
    }

    pub fn contains_interval(&self, other: &ThresholdInterval) -> bool {
        other.a >= self.a && other.b <= self.b
    }
}

pub(crate) fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

pub(crate) fn sigmoid(l: f64) -> f64 {
    if l >= 0.0 {
        1.0 / (1.0 + (-l).exp())
    } else {
        let e = l.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reversed_and_out_of_range() {
        assert!(ThresholdInterval::new(0.3, 0.2).is_err());
        assert!(ThresholdInterval::new(0.2, 0.2).is_err());
        assert!(ThresholdInterval::new(-0.1, 0.2).is_err());
        assert!(ThresholdInterval::new(0.1, 1.2).is_err());
        assert!(ThresholdInterval::new(f64::NAN, 0.2).is_err());
    }

    #[test]
    fn log_odds_only_inside() {
        assert!(ThresholdInterval::unit().log_odds().is_none());
        let iv = ThresholdInterval::new(0.25, 0.75).unwrap();
        let (la, lb) = iv.log_odds().unwrap();
        assert!((la + 3f64.ln()).abs() < 1e-15);
        assert!((lb - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sigmoid_inverts_logit() {
        for p in [1e-9, 0.1, 0.5, 0.73, 0.999] {
            assert!((sigmoid(logit(p)) - p).abs() < 1e-12);
        }
    }
}
