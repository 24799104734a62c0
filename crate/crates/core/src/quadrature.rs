//! Adaptive Gauss–Legendre quadrature for smooth integrands.
//!
//! Used as an independent numerical route for identities whose other side is
//! a closed form, and for integrals on rescaled axes.

use std::sync::OnceLock;

const ORDER: usize = 20;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

// P_n(x) and P_n'(x) by the three-term recurrence
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(ORDER))
}

/// Fixed 20-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Adaptive estimate of `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let whole = fixed(&f, a, b);
    refine(&f, a, b, whole, tol, 0)
}

fn refine<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let mid = 0.5 * (a + b);
    let left = fixed(f, a, mid);
    let right = fixed(f, mid, b);
    let split = left + right;
    if (split - whole).abs() <= tol || depth >= 40 {
        return split;
    }
    refine(f, a, mid, left, 0.5 * tol, depth + 1) + refine(f, mid, b, right, 0.5 * tol, depth + 1)
}

/// Sum of adaptive integrals over consecutive pieces `[p_k, p_{k+1}]`.
///
/// `points` must be sorted; use it to split an integrand at its kinks.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: f64) -> f64 {
    let pieces = points.len().saturating_sub(1).max(1);
    points
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], tol / pieces as f64))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 5, 20, 33] {
            let (_, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn exact_for_polynomials() {
        // a 20-point rule integrates degree 39 exactly
        let v = fixed(&|x: f64| x.powi(39) + x.powi(10), 0.0, 1.0);
        assert!((v - (1.0 / 40.0 + 1.0 / 11.0)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_log_singularity_nearby() {
        let v = integrate(|x: f64| 1.0 / x, 1e-6, 1.0, 1e-12);
        assert!((v - 1e6f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn piecewise_kink() {
        let v = integrate_piecewise(|x: f64| (x - 0.3).abs(), &[0.0, 0.3, 1.0], 1e-14);
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
    }
}
