mod common;

use proptest::prelude::*;
use regretkit::calibration::{brier_decomposition, log_loss_decomposition, pav_fit};
use regretkit::dca::{bounded_net_benefit, net_benefit, treat_all_net_benefit};
use regretkit::hmeasure::{h_measure, WeightSpec};
use regretkit::ranking::auc_roc;
use regretkit::regret::{minimal_regret, RegretCurve, Weight};
use regretkit::scoring::{bounded_brier, bounded_log_loss, brier};
use regretkit::{LabeledScores, Observation, ThresholdInterval};

fn score() -> impl Strategy<Value = f64> {
    prop_oneof![
        0.0..=1.0f64,
        (0u32..=10).prop_map(|k| k as f64 / 10.0),
        Just(0.0),
        Just(1.0),
    ]
}

fn dataset() -> impl Strategy<Value = LabeledScores> {
    prop::collection::vec((any::<bool>(), score()), 1..40).prop_map(|rows| {
        LabeledScores::new(
            rows.into_iter()
                .map(|(label, score)| Observation { label, score })
                .collect(),
        )
        .unwrap()
    })
}

fn two_class() -> impl Strategy<Value = LabeledScores> {
    dataset().prop_filter("both classes", |d| d.n_pos() > 0 && d.n_neg() > 0)
}

fn interior() -> impl Strategy<Value = ThresholdInterval> {
    (0.001..0.999f64, 0.001..0.999f64)
        .prop_filter("distinct", |(a, b)| (a - b).abs() > 1e-4)
        .prop_map(|(a, b)| ThresholdInterval::new(a.min(b), a.max(b)).unwrap())
}

proptest! {
    #[test]
    fn regret_curve_is_nonnegative_and_matches_definition(d in dataset(), c in 0.0..=1.0f64) {
        let curve = RegretCurve::new(&d);
        let r = curve.eval(c);
        prop_assert!(r >= -1e-15);
        if c > 0.0 {
            prop_assert!((r - minimal_regret(&d, c)).abs() <= 1e-12);
        }
    }

    #[test]
    fn regret_segments_tile_the_unit_interval(d in dataset()) {
        let curve = RegretCurve::new(&d);
        let segs: Vec<_> = curve.segments().collect();
        prop_assert_eq!(segs.first().unwrap().lo, 0.0);
        prop_assert_eq!(segs.last().unwrap().hi, 1.0);
        for w in segs.windows(2) {
            prop_assert_eq!(w[0].hi, w[1].lo);
            prop_assert!(w[0].lo < w[0].hi);
        }
    }

    #[test]
    fn uniform_integral_over_unit_is_half_brier(d in dataset()) {
        let curve = RegretCurve::new(&d);
        let mean = curve.mean(ThresholdInterval::unit(), Weight::Uniform).unwrap();
        prop_assert!((2.0 * mean - brier(&d)).abs() <= 1e-10);
        prop_assert_eq!(bounded_brier(&d, ThresholdInterval::unit()), brier(&d));
    }

    #[test]
    fn bounded_scores_match_regret_means(d in dataset(), iv in interior()) {
        let curve = RegretCurve::new(&d);
        let uni = curve.mean(iv, Weight::Uniform).unwrap();
        let lo = curve.mean(iv, Weight::LogOdds).unwrap();
        prop_assert!((bounded_brier(&d, iv) - 2.0 * uni).abs() <= 1e-9);
        prop_assert!((bounded_log_loss(&d, iv).unwrap() - lo).abs() <= 1e-9);
    }

    #[test]
    fn bounded_scores_are_permutation_invariant(d in dataset(), iv in interior(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut rows = d.rows().to_vec();
        rows.shuffle(&mut common::rng(seed));
        let shuffled = LabeledScores::new(rows).unwrap();
        prop_assert!((bounded_brier(&d, iv) - bounded_brier(&shuffled, iv)).abs() <= 1e-12);
        prop_assert!(
            (bounded_log_loss(&d, iv).unwrap() - bounded_log_loss(&shuffled, iv).unwrap()).abs() <= 1e-12
        );
    }

    #[test]
    fn widening_keeps_duality(d in dataset(), iv in interior(), grow in 0.0..0.5f64) {
        let wide = ThresholdInterval::new(
            (iv.a() * (1.0 - grow)).max(1e-4),
            (iv.b() + grow * (1.0 - iv.b())).min(1.0 - 1e-4),
        ).unwrap();
        let curve = RegretCurve::new(&d);
        for w in [iv, wide] {
            let gap = bounded_brier(&d, w) - 2.0 * curve.mean(w, Weight::Uniform).unwrap();
            prop_assert!(gap.abs() <= 1e-9);
        }
    }

    #[test]
    fn h_measure_reductions(d in dataset(), iv in interior(), scale in 1e-3..1e3f64) {
        let uni = h_measure(&d, &WeightSpec::uniform().over(iv)).unwrap();
        prop_assert!((2.0 * uni - bounded_brier(&d, iv)).abs() <= 1e-9);
        let lo = h_measure(&d, &WeightSpec::log_odds(iv)).unwrap();
        prop_assert!((lo - bounded_log_loss(&d, iv).unwrap()).abs() <= 1e-9);
        let beta = WeightSpec::beta(2.0, 2.0);
        let scaled = h_measure(&d, &beta.scaled(scale)).unwrap();
        prop_assert!((scaled - h_measure(&d, &beta).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn net_benefit_never_exceeds_prevalence(d in dataset(), tau in 1e-6..(1.0 - 1e-6)) {
        let nb = net_benefit(&d, tau).unwrap();
        prop_assert!(nb <= d.prevalence() + 1e-12);
        let curve = RegretCurve::new(&d);
        prop_assert!((nb + curve.eval(tau) / (1.0 - tau) - d.prevalence()).abs() <= 1e-12 / (1.0 - tau));
    }

    #[test]
    fn treat_all_matches_all_positive_scores(labels in prop::collection::vec(any::<bool>(), 1..30), tau in 1e-6..(1.0 - 1e-6)) {
        let d = LabeledScores::new(
            labels.iter().map(|&label| Observation { label, score: 1.0 }).collect(),
        ).unwrap();
        let nb = net_benefit(&d, tau).unwrap();
        let scale = 1.0 + tau / (1.0 - tau);
        prop_assert!((nb - treat_all_net_benefit(d.prevalence(), tau)).abs() <= 1e-14 * scale);
    }

    #[test]
    fn bounded_net_benefit_is_mean_net_benefit(d in dataset(), iv in interior()) {
        let curve = RegretCurve::new(&d);
        let from_regret = d.prevalence() - curve.integrate(iv, Weight::InverseOneMinus).unwrap() / iv.width();
        prop_assert!((bounded_net_benefit(&d, iv).unwrap() - from_regret).abs() <= 1e-9);
    }

    #[test]
    fn auc_is_rank_invariant(d in two_class(), k in 0.2..5.0f64) {
        let transformed = d.map_scores(|s| s.powf(k)).unwrap();
        let a = auc_roc(&d).unwrap();
        let b = auc_roc(&transformed).unwrap();
        // powf can merge scores that were distinct only by rounding
        let distinct = |x: &LabeledScores| x.score_groups().len();
        if distinct(&d) == distinct(&transformed) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn pav_invariants(d in dataset()) {
        let fit = pav_fit(&d);
        prop_assert!(fit.fitted.windows(2).all(|w| w[0] <= w[1]));
        let residual: f64 = d.canonical().zip(&fit.fitted).map(|(r, p)| p - r.y()).sum();
        prop_assert!(residual.abs() <= 1e-9);
        for b in &fit.blocks {
            prop_assert_eq!(b.value, b.positives as f64 / b.count as f64);
        }
        // fixed point: refitting on the fitted values changes nothing
        let again = d.with_scores(&fit.fitted_input_order(&d)).unwrap();
        let refit = pav_fit(&again);
        prop_assert_eq!(&refit.fitted, &fit.fitted);
    }

    #[test]
    fn decompositions_are_additive(d in dataset()) {
        let b = brier_decomposition(&d);
        prop_assert!((b.calibration_term + b.refinement_term - b.total).abs() <= 1e-12);
        prop_assert!(b.refinement_term >= 0.0);
        let l = log_loss_decomposition(&d);
        if l.total.is_finite() {
            prop_assert!((l.calibration_term + l.refinement_term - l.total).abs() <= 1e-12);
        }
        prop_assert!(l.refinement_term >= 0.0 && l.refinement_term.is_finite());
    }

    #[test]
    fn brier_cross_residual_identity(d in dataset()) {
        let b = brier_decomposition(&d);
        let fit = pav_fit(&d);
        let cross = 2.0 * d.canonical().zip(&fit.fitted)
            .map(|(r, &p)| (r.score - p) * (p - r.y()))
            .sum::<f64>() / d.len() as f64;
        prop_assert!((b.cross_residual - cross).abs() <= 1e-12);
    }
}
