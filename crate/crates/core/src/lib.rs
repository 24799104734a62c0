//! Threshold-aware evaluation of binary probabilistic classifiers.
//!
//! Every metric in this crate is expressed through the minimal-regret curve
//! `R*(c) = c·(1−π)·(1−F0(c)) + (1−c)·π·F1(c)`, the expected cost of acting on
//! a score at threshold `c` when a false positive costs `c` and a false
//! negative costs `1−c`. Scoring rules (Brier, log loss and their bounded
//! variants), H-measures, net benefit and AUC-ROC are all weighted averages
//! or transforms of that curve, and the [`regret::RegretCurve`] stores it
//! exactly as affine segments so every identity can be checked against a
//! breakpoint-exact integral.
//!
//! ```
//! use regretkit::{dataset::LabeledScores, scoring, ThresholdInterval};
//!
//! let data = LabeledScores::from_pairs(&[1, 0, 1, 0], &[0.9, 0.2, 0.6, 0.4]).unwrap();
//! let interval = ThresholdInterval::new(0.05, 0.2).unwrap();
//! let bounded = scoring::bounded_brier(&data, interval);
//! assert!(bounded >= 0.0);
//! ```

pub mod calibration;
pub mod curves;
pub mod dataset;
pub mod dca;
pub mod error;
pub mod hmeasure;
mod interval;
pub mod quadrature;
pub mod ranking;
pub mod regret;
pub mod scoring;
pub mod vickers;

pub use dataset::{EmpiricalDistributionPair, LabeledScores, Observation, TieConvention};
pub use error::{Error, Result};
pub use interval::ThresholdInterval;
pub use regret::{CostRatio, RegretCurve, Weight};
