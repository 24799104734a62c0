#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regretkit::{LabeledScores, Observation, ThresholdInterval};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random dataset with both classes, n in [2, max_n]. About a third of the
/// datasets use coarsely quantized scores so ties are common, and endpoint
/// scores 0 and 1 occur.
pub fn random_dataset(rng: &mut ChaCha8Rng, max_n: usize) -> LabeledScores {
    loop {
        let n = rng.random_range(2..=max_n);
        let mode = rng.random_range(0..3);
        let rows: Vec<Observation> = (0..n)
            .map(|_| {
                let score = match mode {
                    0 => rng.random::<f64>(),
                    1 => rng.random_range(0..=10) as f64 / 10.0,
                    _ => rng.random_range(1..=7) as f64 / 8.0,
                };
                let p = 0.15 + 0.7 * score;
                Observation {
                    label: rng.random::<f64>() < p,
                    score,
                }
            })
            .collect();
        let d = LabeledScores::new(rows).unwrap();
        if d.n_pos() > 0 && d.n_neg() > 0 {
            return d;
        }
    }
}

/// Random interval with `lo ≤ a < b ≤ hi`, at least 1e-3 wide.
pub fn random_interval(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> ThresholdInterval {
    loop {
        let a = rng.random_range(lo..hi);
        let b = rng.random_range(lo..hi);
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if b - a > 1e-3 {
            return ThresholdInterval::new(a, b).unwrap();
        }
    }
}

/// Regret at threshold c computed row by row from the definition.
pub fn direct_regret(d: &LabeledScores, c: f64, tau: f64) -> f64 {
    let n = d.len() as f64;
    d.rows()
        .iter()
        .map(|r| {
            let predicted = r.score >= tau;
            match (r.label, predicted) {
                (false, true) => c / n,
                (true, false) => (1.0 - c) / n,
                _ => 0.0,
            }
        })
        .sum()
}

/// Cut points of `[a, b]` at every distinct score strictly inside it.
pub fn cuts(d: &LabeledScores, iv: ThresholdInterval) -> Vec<f64> {
    let mut pts: Vec<f64> = d.scores().filter(|&s| s > iv.a() && s < iv.b()).collect();
    pts.push(iv.a());
    pts.push(iv.b());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// On each open piece between cuts the minimal regret is affine; recover
/// `u + v·c` from two interior evaluations of the definition.
pub fn affine_pieces(d: &LabeledScores, iv: ThresholdInterval) -> Vec<(f64, f64, f64, f64)> {
    cuts(d, iv)
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let c1 = lo + (hi - lo) / 3.0;
            let c2 = lo + 2.0 * (hi - lo) / 3.0;
            let r1 = direct_regret(d, c1, c1);
            let r2 = direct_regret(d, c2, c2);
            let v = (r2 - r1) / (c2 - c1);
            (lo, hi, r1 - v * c1, v)
        })
        .collect()
}

/// Uniform mean of R* over the interval, from the definition.
pub fn oracle_uniform_mean(d: &LabeledScores, iv: ThresholdInterval) -> f64 {
    affine_pieces(d, iv)
        .into_iter()
        .map(|(lo, hi, _, _)| {
            let mid = 0.5 * (lo + hi);
            (hi - lo) * direct_regret(d, mid, mid)
        })
        .sum::<f64>()
        / iv.width()
}

/// Log-odds mean of R* over an interior interval, from the definition.
pub fn oracle_log_odds_mean(d: &LabeledScores, iv: ThresholdInterval) -> f64 {
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let total: f64 = affine_pieces(d, iv)
        .into_iter()
        .map(|(lo, hi, u, v)| {
            // ∫ (u + v c) / (c (1 − c)) dc = u ln c − (u + v) ln(1 − c)
            u * (hi / lo).ln() + (u + v) * ((1.0 - lo) / (1.0 - hi)).ln()
        })
        .sum();
    total / (logit(iv.b()) - logit(iv.a()))
}

/// Pair-counting AUC over all positive/negative pairs.
pub fn brute_force_auc(d: &LabeledScores) -> f64 {
    let pos: Vec<f64> = d
        .rows()
        .iter()
        .filter(|r| r.label)
        .map(|r| r.score)
        .collect();
    let neg: Vec<f64> = d
        .rows()
        .iter()
        .filter(|r| !r.label)
        .map(|r| r.score)
        .collect();
    let mut wins = 0.0;
    for &p in &pos {
        for &q in &neg {
            wins += if p > q {
                1.0
            } else if p == q {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// Minimum-SSE nondecreasing step fit over ordered groups, by enumerating
/// every contiguous partition. `groups` holds `(count, positives)` per
/// distinct score in ascending order. Returns per-group fitted values.
pub fn brute_force_isotonic(groups: &[(usize, usize)]) -> Vec<f64> {
    let k = groups.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 0u32..(1 << (k - 1)) {
        // bit i set: a block boundary after group i
        let mut fitted = vec![0.0; k];
        let mut start = 0;
        let mut prev_mean = f64::NEG_INFINITY;
        let mut monotone = true;
        let mut sse = 0.0;
        for end in 0..k {
            let boundary = end == k - 1 || mask & (1 << end) != 0;
            if !boundary {
                continue;
            }
            let count: usize = groups[start..=end].iter().map(|g| g.0).sum();
            let pos: usize = groups[start..=end].iter().map(|g| g.1).sum();
            let mean = pos as f64 / count as f64;
            if mean < prev_mean {
                monotone = false;
                break;
            }
            prev_mean = mean;
            // SSE of 0/1 labels around the mean
            sse += pos as f64 * (1.0 - mean).powi(2) + (count - pos) as f64 * mean.powi(2);
            for f in &mut fitted[start..=end] {
                *f = mean;
            }
            start = end + 1;
        }
        if monotone && best.as_ref().is_none_or(|(b, _)| sse < *b - 1e-12) {
            best = Some((sse, fitted));
        }
    }
    best.expect("the single-block fit is always monotone").1
}
