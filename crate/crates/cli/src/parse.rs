//! Parsers for cost-ratio flags. Cost ratios are written as decimals
//! (`0.05`) or, behind an `odds=` prefix, as odds `1:19`, meaning
//! `c = 1 / (1 + 19)`.

use regretkit::ThresholdInterval;

const ODDS: &str = "odds=";

fn decimal(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

/// `a:b` odds to a cost ratio `a / (a + b)`.
fn odds(s: &str) -> Result<f64, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("odds `{s}` must look like 1:10"))?;
    let (a, b) = (decimal(a)?, decimal(b)?);
    if a < 0.0 || b < 0.0 || a + b <= 0.0 {
        return Err(format!("odds `{s}` must be nonnegative and not both zero"));
    }
    Ok(a / (a + b))
}

fn unit(v: f64, raw: &str) -> Result<f64, String> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("cost ratio `{raw}` is outside [0, 1]"))
    }
}

/// Comma-separated cost ratios from one flag value.
#[derive(Debug, Clone, PartialEq)]
pub struct CostList(pub Vec<f64>);

/// A list flag value, `0.1,0.25` or `odds=1:9,1:3`.
pub fn cost_list_arg(s: &str) -> Result<CostList, String> {
    cost_list(s).map(CostList)
}

/// A list of cost ratios, `0.1,0.25` or `odds=1:9,1:3`.
pub fn cost_list(s: &str) -> Result<Vec<f64>, String> {
    let (body, as_odds) = match s.strip_prefix(ODDS) {
        Some(rest) => (rest, true),
        None => (s, false),
    };
    body.split(',')
        .map(|part| {
            let part = part.trim();
            let v = match part.strip_prefix(ODDS) {
                Some(rest) => odds(rest)?,
                None if as_odds => odds(part)?,
                None => decimal(part)?,
            };
            unit(v, part)
        })
        .collect()
}

/// An interval `a:b`, or `odds=1:100,1:5`.
pub fn interval(s: &str) -> Result<ThresholdInterval, String> {
    let (a, b) = if s.starts_with(ODDS) {
        match cost_list(s)?.as_slice() {
            [a, b] => (*a, *b),
            _ => return Err(format!("odds interval `{s}` needs exactly two odds")),
        }
    } else {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("interval `{s}` must look like 0.05:0.2"))?;
        (unit(decimal(a)?, a)?, unit(decimal(b)?, b)?)
    };
    ThresholdInterval::new(a, b).map_err(|e| e.to_string())
}

/// Beta weight parameters `α,β`.
pub fn beta(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("beta parameters `{s}` must look like 2,2"))?;
    let (a, b) = (decimal(a)?, decimal(b)?);
    if a > 0.0 && b > 0.0 {
        Ok((a, b))
    } else {
        Err(format!("beta parameters must be positive, got {a},{b}"))
    }
}

/// A threshold strictly inside `(0, 1)`, decimal or odds.
pub fn threshold(s: &str) -> Result<f64, String> {
    match cost_list(s)?.as_slice() {
        [t] if *t > 0.0 && *t < 1.0 => Ok(*t),
        [t] => Err(format!("threshold {t} must lie strictly inside (0, 1)")),
        _ => Err(format!("`{s}` is not a single threshold")),
    }
}

/// A cost ratio in `[0, 1]`, decimal or odds.
pub fn cost(s: &str) -> Result<f64, String> {
    match cost_list(s)?.as_slice() {
        [c] => Ok(*c),
        _ => Err(format!("`{s}` is not a single cost ratio")),
    }
}
