mod common;

use common::{cuts, direct_regret, random_dataset, random_interval, rng};
use rand::Rng;
use regretkit::curves::{build_curve, emit, CurveAxis, CurveKind, CurveSpec, Format};
use regretkit::dca::bounded_net_benefit;
use regretkit::hmeasure::{h_measure, WeightSpec};
use regretkit::ranking::auc_roc;
use regretkit::regret::RegretCurve;
use regretkit::scoring::{bounded_brier, bounded_log_loss, brier, log_loss, shifted_brier};
use regretkit::{LabeledScores, Observation, ThresholdInterval};

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, steps: usize) -> f64 {
    let h = (b - a) / steps as f64;
    let mut sum = f(a) + f(b);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn beta_h_measure_matches_simpson() {
    let mut r = rng(11);
    for _ in 0..60 {
        let d = random_dataset(&mut r, 30);
        let alpha = r.random_range(2.0..6.0);
        let beta = r.random_range(2.0..6.0);
        let w = |c: f64| c.powf(alpha - 1.0) * (1.0 - c).powf(beta - 1.0);
        let mut num = 0.0;
        for piece in cuts(&d, ThresholdInterval::unit()).windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            let mid = 0.5 * (lo + hi);
            // slope and intercept of the affine piece from two evaluations
            let q = lo + 0.25 * (hi - lo);
            let (r1, r2) = (direct_regret(&d, q, q), direct_regret(&d, mid, mid));
            let v = (r2 - r1) / (mid - q);
            let u = r1 - v * q;
            num += simpson(|c| w(c) * (u + v * c), lo, hi, 2000);
        }
        let den = simpson(w, 0.0, 1.0, 20000);
        let got = h_measure(&d, &WeightSpec::beta(alpha, beta)).unwrap();
        assert!(
            (got - num / den).abs() <= 1e-8,
            "alpha={alpha} beta={beta}: {got} vs {}",
            num / den
        );
    }
}

#[test]
fn shifted_brier_is_regret_average_at_moved_thresholds() {
    let mut r = rng(12);
    for _ in 0..200 {
        let d = random_dataset(&mut r, 25);
        let mu: f64 = r.random_range(0.05..0.95);
        let adjust = |s: f64| s * (1.0 - mu) / (s * (1.0 - mu) + (1.0 - s) * mu);
        let unadjust = |c: f64| c * mu / (c * mu + (1.0 - c) * (1.0 - mu));
        // cost c acts on the original scores at threshold unadjust(c); the
        // integrand is affine between the adjusted scores
        let mut pts: Vec<f64> = d.scores().map(adjust).collect();
        pts.extend([0.0, 1.0]);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let oracle: f64 = 2.0
            * pts
                .windows(2)
                .map(|w| {
                    let mid = 0.5 * (w[0] + w[1]);
                    (w[1] - w[0]) * direct_regret(&d, mid, unadjust(mid))
                })
                .sum::<f64>();
        let got = shifted_brier(&d, mu).unwrap();
        assert!((got - oracle).abs() <= 1e-10, "mu={mu}: {got} vs {oracle}");
    }
}

#[test]
fn bounded_net_benefit_matches_closed_form_average() {
    let mut r = rng(13);
    for _ in 0..300 {
        let d = random_dataset(&mut r, 30);
        let iv = random_interval(&mut r, 0.01, 0.95);
        let n = d.len() as f64;
        // ∫ τ/(1−τ) dτ = −τ − ln(1−τ)
        let odds_integral = |t: f64| -t - (1.0 - t).ln();
        let total: f64 = cuts(&d, iv)
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                let tp = d
                    .rows()
                    .iter()
                    .filter(|o| o.label && o.score >= mid)
                    .count() as f64
                    / n;
                let fp = d
                    .rows()
                    .iter()
                    .filter(|o| !o.label && o.score >= mid)
                    .count() as f64
                    / n;
                tp * (w[1] - w[0]) - fp * (odds_integral(w[1]) - odds_integral(w[0]))
            })
            .sum();
        let oracle = total / iv.width();
        let got = bounded_net_benefit(&d, iv).unwrap();
        assert!((got - oracle).abs() <= 1e-9, "{iv:?}: {got} vs {oracle}");
    }
}

/// Groups whose empirical positive rate equals their score exactly.
fn calibrated(r: &mut rand_chacha::ChaCha8Rng) -> LabeledScores {
    let mut rows = Vec::new();
    for _ in 0..r.random_range(1..6) {
        let m = r.random_range(1..=8usize);
        let k = r.random_range(0..=m);
        let score = k as f64 / m as f64;
        for i in 0..m {
            rows.push(Observation {
                label: i < k,
                score,
            });
        }
    }
    LabeledScores::new(rows).unwrap()
}

#[test]
fn thresholding_at_cost_is_optimal_when_calibrated() {
    let mut r = rng(14);
    for _ in 0..300 {
        let d = calibrated(&mut r);
        let taus: Vec<f64> = d.scores().chain([1.5]).collect();
        for i in 1..50 {
            let c = i as f64 / 50.0;
            let at_c = direct_regret(&d, c, c);
            for &t in &taus {
                assert!(at_c <= direct_regret(&d, c, t) + 1e-12, "c={c} tau={t}");
            }
            let curve = RegretCurve::new(&d);
            assert!((curve.eval(c) - at_c).abs() <= 1e-12);
        }
    }
}

fn single(label: bool, score: f64) -> LabeledScores {
    LabeledScores::new(vec![Observation { label, score }]).unwrap()
}

fn expected(p: f64, loss: impl Fn(&LabeledScores) -> f64, q: f64) -> f64 {
    p * loss(&single(true, q)) + (1.0 - p) * loss(&single(false, q))
}

#[test]
fn scores_are_proper_in_expectation() {
    let iv = ThresholdInterval::new(0.2, 0.7).unwrap();
    let grid: Vec<f64> = (1..40).map(|i| i as f64 / 40.0).collect();
    for &p in &grid {
        for &q in &grid {
            let gaps = [
                expected(p, brier, q) - expected(p, brier, p),
                expected(p, |d| log_loss(d, None), q) - expected(p, |d| log_loss(d, None), p),
                expected(p, |d| bounded_brier(d, iv), q) - expected(p, |d| bounded_brier(d, iv), p),
                expected(p, |d| bounded_log_loss(d, iv).unwrap(), q)
                    - expected(p, |d| bounded_log_loss(d, iv).unwrap(), p),
                // a benefit, so the honest forecast maximizes it
                expected(p, |d| bounded_net_benefit(d, iv).unwrap(), p)
                    - expected(p, |d| bounded_net_benefit(d, iv).unwrap(), q),
            ];
            for (i, g) in gaps.iter().enumerate() {
                assert!(*g >= -1e-12, "score {i}: p={p} q={q} gap {g}");
            }
        }
    }
}

fn spec(kind: CurveKind, axis: CurveAxis, iv: ThresholdInterval) -> CurveSpec {
    CurveSpec {
        axis,
        fill_range: Some(iv),
        ..CurveSpec::new(kind)
    }
}

#[test]
fn curve_fill_areas_agree_with_metrics() {
    let mut r = rng(15);
    for _ in 0..100 {
        let d = random_dataset(&mut r, 40);
        let iv = random_interval(&mut r, 0.02, 0.98);
        let models = [("m", &d)];
        let area = |kind, axis| {
            build_curve(&models, &spec(kind, axis, iv)).unwrap().series[0]
                .fill
                .unwrap()
                .area
        };
        let half_brier = bounded_brier(&d, iv) / 2.0;
        let ll = bounded_log_loss(&d, iv).unwrap();
        let checks = [
            (area(CurveKind::Brier, CurveAxis::CostRatio), half_brier),
            (area(CurveKind::LogLoss, CurveAxis::CostRatio), ll),
            (area(CurveKind::LogLoss, CurveAxis::LogOdds), ll),
            (
                area(CurveKind::Decision, CurveAxis::CostRatio),
                bounded_net_benefit(&d, iv).unwrap(),
            ),
            (
                area(CurveKind::Decision, CurveAxis::RescaledQuadratic),
                half_brier,
            ),
            (area(CurveKind::Decision, CurveAxis::RescaledLog), ll),
        ];
        for (i, (got, want)) in checks.iter().enumerate() {
            assert!((got - want).abs() <= 1e-6, "check {i}: {got} vs {want}");
        }
        let roc = build_curve(
            &models,
            &CurveSpec {
                fill_range: None,
                ..CurveSpec::new(CurveKind::Roc)
            },
        )
        .unwrap();
        assert_eq!(roc.series[0].fill.unwrap().area, auc_roc(&d).unwrap());
    }
}

#[test]
fn log_odds_axis_is_a_reparametrization() {
    let mut r = rng(16);
    for _ in 0..50 {
        let d = random_dataset(&mut r, 30);
        let curve = RegretCurve::new(&d);
        let plot = build_curve(
            &[("m", &d)],
            &CurveSpec {
                axis: CurveAxis::LogOdds,
                ..CurveSpec::new(CurveKind::LogLoss)
            },
        )
        .unwrap();
        let s = &plot.series[0];
        assert!(s.x.windows(2).all(|w| w[0] < w[1]));
        for ((&x, &y), &c) in s.x.iter().zip(&s.y).zip(&s.tau) {
            assert!((x - (c / (1.0 - c)).ln()).abs() <= 1e-12);
            assert!((y - curve.eval(c)).abs() <= 1e-15);
        }
    }
}

#[test]
fn json_output_round_trips_bit_exact() {
    let mut r = rng(17);
    for kind in [
        CurveKind::Brier,
        CurveKind::LogLoss,
        CurveKind::Decision,
        CurveKind::Roc,
    ] {
        let d = random_dataset(&mut r, 50);
        let plot = build_curve(&[("m", &d)], &CurveSpec::new(kind)).unwrap();
        let mut buf = Vec::new();
        emit(&plot, Format::Json, &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let series = &value["series"][0];
        for (field, want) in [("x", &plot.series[0].x), ("y", &plot.series[0].y)] {
            let got: Vec<f64> = series[field]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_f64().unwrap())
                .collect();
            assert_eq!(got.len(), want.len());
            for (g, w) in got.iter().zip(want.iter()) {
                assert_eq!(g.to_bits(), w.to_bits(), "{kind:?} {field}");
            }
        }
        let mut again = Vec::new();
        emit(&plot, Format::Json, &mut again).unwrap();
        assert_eq!(buf, again);
    }
}
