//! Renderable curve data: regret curves on several axes, decision curves and
//! ROC staircases, with shaded fill areas and odds-labeled ticks.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Serialize, Serializer};

use crate::dataset::LabeledScores;
use crate::dca::{self, NetBenefit, Rescale};
use crate::error::{Error, Result};
use crate::interval::{logit, sigmoid, ThresholdInterval};
use crate::quadrature;
use crate::ranking;
use crate::regret::RegretCurve;

/// Number of uniform samples on the drawing axis.
pub const GRID_POINTS: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    /// `R*(c)`, shaded area is the uniform mean of regret.
    Brier,
    /// `R*(c)`, shaded area is the log-odds mean of regret.
    LogLoss,
    /// Net benefit against threshold.
    Decision,
    /// True positive rate against false positive rate.
    Roc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveAxis {
    CostRatio,
    LogOdds,
    /// `−(1−c)²/2`; decision curves only.
    RescaledQuadratic,
    /// `ln c`; decision curves only.
    RescaledLog,
}

impl CurveAxis {
    pub fn forward(self, c: f64) -> f64 {
        match self {
            CurveAxis::CostRatio => c,
            CurveAxis::LogOdds => logit(c),
            CurveAxis::RescaledQuadratic => Rescale::Quadratic.forward(c),
            CurveAxis::RescaledLog => Rescale::Logarithmic.forward(c),
        }
    }

    pub fn inverse(self, x: f64) -> f64 {
        match self {
            CurveAxis::CostRatio => x,
            CurveAxis::LogOdds => sigmoid(x),
            CurveAxis::RescaledQuadratic => Rescale::Quadratic.inverse(x),
            CurveAxis::RescaledLog => Rescale::Logarithmic.inverse(x),
        }
    }

    fn rescale(self) -> Option<Rescale> {
        match self {
            CurveAxis::RescaledQuadratic => Some(Rescale::Quadratic),
            CurveAxis::RescaledLog => Some(Rescale::Logarithmic),
            _ => None,
        }
    }
}

/// What to draw and which range to shade.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub kind: CurveKind,
    pub draw_range: ThresholdInterval,
    pub fill_range: Option<ThresholdInterval>,
    /// Tick positions as cost ratios.
    pub ticks: Vec<f64>,
    pub axis: CurveAxis,
}

impl CurveSpec {
    pub fn new(kind: CurveKind) -> Self {
        Self {
            kind,
            draw_range: ThresholdInterval::new(0.01, 0.99).expect("valid"),
            fill_range: None,
            ticks: Vec::new(),
            axis: CurveAxis::CostRatio,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::CurveSpec(msg));
        if self.kind == CurveKind::Roc {
            if self.axis != CurveAxis::CostRatio {
                return bad("roc curves have no threshold axis".to_string());
            }
            if self.fill_range.is_some() {
                return bad("roc curves take no fill range".to_string());
            }
            return Ok(());
        }
        if self.axis.rescale().is_some() && self.kind != CurveKind::Decision {
            return bad("rescaled axes apply to decision curves only".to_string());
        }
        let needs_interior = self.axis != CurveAxis::CostRatio || self.kind == CurveKind::Decision;
        if needs_interior && !self.draw_range.is_interior() {
            return bad(
                "draw range must lie strictly inside (0, 1) for this kind and axis".to_string(),
            );
        }
        if let Some(fill) = self.fill_range {
            if !self.draw_range.contains_interval(&fill) {
                return bad(format!(
                    "fill range [{}, {}] is outside the draw range",
                    fill.a(),
                    fill.b()
                ));
            }
            if self.kind != CurveKind::Brier && !fill.is_interior() {
                return bad("fill range must lie strictly inside (0, 1)".to_string());
            }
        }
        if let Some(&t) = self.ticks.iter().find(|&&t| !self.draw_range.contains(t)) {
            return bad(format!("tick {t} is outside the draw range"));
        }
        Ok(())
    }
}

/// A tick at cost ratio `c`, placed at `x` on the axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tick {
    pub c: f64,
    pub x: f64,
    pub label: String,
}

/// Shaded region and its metric value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Fill {
    pub a: f64,
    pub b: f64,
    pub area: f64,
}

/// A named reference line sampled at the series' `x`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reference {
    pub name: String,
    pub y: Vec<f64>,
}

/// One model's curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub model: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Threshold at each sample.
    #[serde(serialize_with = "finite_or_string")]
    pub tau: Vec<f64>,
    pub fill: Option<Fill>,
    pub references: Vec<Reference>,
}

/// Curves for one or more models sharing axis metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePlot {
    pub schema: u32,
    pub kind: CurveKind,
    pub axis: CurveAxis,
    pub draw_range: ThresholdInterval,
    pub ticks: Vec<Tick>,
    pub series: Vec<CurveSeries>,
}

fn finite_or_string<S: Serializer>(values: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for &v in values {
        if v.is_finite() {
            seq.serialize_element(&v)?;
        } else if v.is_nan() {
            seq.serialize_element("nan")?;
        } else if v > 0.0 {
            seq.serialize_element("inf")?;
        } else {
            seq.serialize_element("-inf")?;
        }
    }
    seq.end()
}

/// Odds string for a cost ratio: `1:k` when `c ≤ ½`, `k:1` above.
pub fn odds_label(c: f64) -> String {
    let fmt = |k: f64| {
        let rounded = k.round();
        if (k - rounded).abs() <= 1e-3 * k.max(1.0) {
            format!("{rounded}")
        } else {
            let s = format!("{k:.3}");
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        }
    };
    if c <= 0.5 {
        format!("1:{}", fmt((1.0 - c) / c))
    } else {
        format!("{}:1", fmt(c / (1.0 - c)))
    }
}

/// Build one series per model. Every series shares the same `x` samples.
pub fn build_curve(models: &[(&str, &LabeledScores)], spec: &CurveSpec) -> Result<CurvePlot> {
    spec.validate()?;
    if models.is_empty() {
        return Err(Error::CurveSpec("no models".to_string()));
    }
    let series = if spec.kind == CurveKind::Roc {
        models
            .iter()
            .map(|(name, d)| roc_series(name, d))
            .collect::<Result<Vec<_>>>()?
    } else {
        let grid = threshold_samples(models, spec);
        models
            .iter()
            .map(|(name, d)| threshold_series(name, d, spec, &grid))
            .collect::<Result<Vec<_>>>()?
    };
    let axis = spec.axis;
    let ticks = spec
        .ticks
        .iter()
        .map(|&c| Tick {
            c,
            x: if spec.kind == CurveKind::Roc {
                c
            } else {
                axis.forward(c)
            },
            label: odds_label(c),
        })
        .collect();
    Ok(CurvePlot {
        schema: 1,
        kind: spec.kind,
        axis,
        draw_range: spec.draw_range,
        ticks,
        series,
    })
}

/// Sample cost ratios: uniform on the drawing axis, plus every model's score
/// breakpoints and the fill endpoints inside the draw range.
fn threshold_samples(models: &[(&str, &LabeledScores)], spec: &CurveSpec) -> Vec<f64> {
    let (a, b) = (spec.draw_range.a(), spec.draw_range.b());
    let (xa, xb) = (spec.axis.forward(a), spec.axis.forward(b));
    let mut cs: Vec<f64> = (0..GRID_POINTS)
        .map(|i| {
            spec.axis
                .inverse(xa + (xb - xa) * i as f64 / (GRID_POINTS - 1) as f64)
        })
        .collect();
    cs[0] = a;
    cs[GRID_POINTS - 1] = b;
    for (_, d) in models {
        cs.extend(d.scores().filter(|&s| s >= a && s <= b));
    }
    if let Some(f) = spec.fill_range {
        cs.extend([f.a(), f.b()]);
    }
    cs.retain(|&c| c >= a && c <= b);
    cs.sort_by(f64::total_cmp);
    cs.dedup();
    // drop samples that collapse onto the same axis coordinate
    let mut out: Vec<f64> = Vec::with_capacity(cs.len());
    for c in cs {
        if out
            .last()
            .is_none_or(|&p| spec.axis.forward(p) < spec.axis.forward(c))
        {
            out.push(c);
        }
    }
    out
}

fn threshold_series(
    name: &str,
    d: &LabeledScores,
    spec: &CurveSpec,
    grid: &[f64],
) -> Result<CurveSeries> {
    let x: Vec<f64> = grid.iter().map(|&c| spec.axis.forward(c)).collect();
    let (y, fill, references) = match spec.kind {
        CurveKind::Brier | CurveKind::LogLoss => {
            let curve = RegretCurve::new(d);
            let y = grid.iter().map(|&c| curve.eval(c)).collect();
            let fill = spec.fill_range.map(|f| {
                let area = if spec.kind == CurveKind::Brier {
                    regret_area(&curve, f, |_| 1.0) / f.width()
                } else {
                    regret_area(&curve, f, |c| 1.0 / (c * (1.0 - c)))
                        / f.log_odds_width().expect("interior")
                };
                Fill {
                    a: f.a(),
                    b: f.b(),
                    area,
                }
            });
            (
                y,
                fill,
                vec![Reference {
                    name: "zero".to_string(),
                    y: vec![0.0; grid.len()],
                }],
            )
        }
        CurveKind::Decision => {
            let nb = NetBenefit::new(d);
            let pi = nb.prevalence();
            let y = grid.iter().map(|&t| nb.at(t)).collect();
            let fill = match spec.fill_range {
                Some(f) => {
                    let area = match spec.axis.rescale() {
                        Some(r) => dca::rescaled_area(&nb, f, r)?,
                        None => mean_net_benefit(&nb, f),
                    };
                    Some(Fill {
                        a: f.a(),
                        b: f.b(),
                        area,
                    })
                }
                None => None,
            };
            let references = vec![
                Reference {
                    name: "treat-all".to_string(),
                    y: grid
                        .iter()
                        .map(|&t| dca::treat_all_net_benefit(pi, t))
                        .collect(),
                },
                Reference {
                    name: "treat-none".to_string(),
                    y: vec![0.0; grid.len()],
                },
                Reference {
                    name: "prevalence".to_string(),
                    y: vec![pi; grid.len()],
                },
            ];
            (y, fill, references)
        }
        CurveKind::Roc => unreachable!("handled separately"),
    };
    Ok(CurveSeries {
        model: name.to_string(),
        x,
        y,
        tau: grid.to_vec(),
        fill,
        references,
    })
}

fn pieces(knots: &[f64], f: ThresholdInterval) -> Vec<f64> {
    let mut cuts = vec![f.a()];
    cuts.extend(knots.iter().copied().filter(|&k| k > f.a() && k < f.b()));
    cuts.push(f.b());
    cuts
}

// ∫ w(c)·R*(c) dc by quadrature between knots
fn regret_area(curve: &RegretCurve, f: ThresholdInterval, w: impl Fn(f64) -> f64) -> f64 {
    quadrature::integrate_piecewise(|c| w(c) * curve.eval(c), &pieces(curve.knots(), f), 1e-13)
}

fn mean_net_benefit(nb: &NetBenefit, f: ThresholdInterval) -> f64 {
    quadrature::integrate_piecewise(|t| nb.at(t), &pieces(nb.breakpoints(), f), 1e-13) / f.width()
}

fn roc_series(name: &str, d: &LabeledScores) -> Result<CurveSeries> {
    let roc = ranking::roc_curve(d)?;
    let x: Vec<f64> = roc.points.iter().map(|p| p.0).collect();
    let y = roc.points.iter().map(|p| p.1).collect();
    let chance = x.clone();
    Ok(CurveSeries {
        model: name.to_string(),
        x,
        y,
        tau: roc.thresholds,
        fill: Some(Fill {
            a: 0.0,
            b: 1.0,
            area: roc.auc,
        }),
        references: vec![Reference {
            name: "chance".to_string(),
            y: chance,
        }],
    })
}

/// Output format for [`emit`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Svg,
}

pub fn emit<W: Write>(plot: &CurvePlot, format: Format, sink: W) -> Result<()> {
    if plot.series.is_empty() {
        return Err(Error::CurveSpec("no series to emit".to_string()));
    }
    match format {
        Format::Json => emit_json(plot, sink),
        Format::Csv => emit_csv(plot, sink),
        Format::Svg => emit_svg(plot, sink),
    }
}

fn emit_json<W: Write>(plot: &CurvePlot, mut sink: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut sink, plot).map_err(|e| match e.io_error_kind() {
        Some(kind) => Error::Io(std::io::Error::new(kind, e)),
        None => Error::CurveSpec(e.to_string()),
    })?;
    sink.write_all(b"\n")?;
    sink.flush()?;
    Ok(())
}

fn emit_csv<W: Write>(plot: &CurvePlot, sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::CurveSpec(format!("{other:?}")),
    };
    writer.write_record(["model", "x", "y"]).map_err(io)?;
    for s in &plot.series {
        for (x, y) in s.x.iter().zip(&s.y) {
            writer
                .write_record([s.model.as_str(), &x.to_string(), &y.to_string()])
                .map_err(io)?;
        }
    }
    writer.flush()?;
    Ok(())
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;
const PALETTE: [&str; 6] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - 2.0 * MARGIN)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - 2.0 * MARGIN)
    }
}

fn emit_svg<W: Write>(plot: &CurvePlot, mut sink: W) -> Result<()> {
    let finite = |v: &&f64| v.is_finite();
    let xs = plot.series.iter().flat_map(|s| s.x.iter()).filter(finite);
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let ys = plot
        .series
        .iter()
        .flat_map(|s| {
            s.y.iter()
                .chain(s.references.iter().flat_map(|r| r.y.iter()))
        })
        .filter(finite);
    let (mut y0, mut y1) = ys.fold((0.0f64, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if plot.kind == CurveKind::Decision {
        // treat-all dives steeply; keep the view near the model curves
        let model_min = plot
            .series
            .iter()
            .flat_map(|s| s.y.iter())
            .fold(0.0f64, |m, &v| m.min(v));
        y0 = model_min.min(0.0) - 0.05 * y1.abs().max(1e-9);
    }
    if y1.is_nan() || y0.is_nan() || y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let frame = Frame {
        x0,
        x1: if x1 > x0 { x1 } else { x0 + 1.0 },
        y0,
        y1,
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        out,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        out,
        r##"<clipPath id="plot"><rect x="{m}" y="{m}" width="{w:.2}" height="{h:.2}"/></clipPath>"##,
        m = MARGIN,
        w = WIDTH - 2.0 * MARGIN,
        h = HEIGHT - 2.0 * MARGIN
    );

    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if let Some(fill) = s.fill {
            let (fa, fb) = if plot.kind == CurveKind::Roc {
                (fill.a, fill.b)
            } else {
                (plot.axis.forward(fill.a), plot.axis.forward(fill.b))
            };
            let baseline: Vec<f64> = match plot.kind {
                CurveKind::Decision => s
                    .references
                    .iter()
                    .find(|r| r.name == "prevalence")
                    .map(|r| r.y.clone())
                    .unwrap_or_else(|| vec![0.0; s.x.len()]),
                _ => vec![0.0; s.x.len()],
            };
            let inside: Vec<usize> = (0..s.x.len())
                .filter(|&k| s.x[k] >= fa && s.x[k] <= fb)
                .collect();
            if !inside.is_empty() {
                let mut pts = String::new();
                for &k in &inside {
                    let _ = write!(pts, "{:.2},{:.2} ", frame.px(s.x[k]), frame.py(s.y[k]));
                }
                for &k in inside.iter().rev() {
                    let _ = write!(pts, "{:.2},{:.2} ", frame.px(s.x[k]), frame.py(baseline[k]));
                }
                let _ = writeln!(
                    out,
                    r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none" clip-path="url(#plot)"/>"#,
                    pts.trim_end()
                );
            }
        }
        for (j, r) in s.references.iter().enumerate() {
            if i > 0 && r.name != "prevalence" && plot.kind != CurveKind::Decision {
                continue;
            }
            let dash = if j % 2 == 0 { "4 3" } else { "1 3" };
            let _ = writeln!(
                out,
                r##"<polyline points="{}" fill="none" stroke="#888888" stroke-dasharray="{dash}" clip-path="url(#plot)"/>"##,
                polyline(&frame, &s.x, &r.y)
            );
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5" clip-path="url(#plot)"/>"#,
            polyline(&frame, &s.x, &s.y)
        );
    }

    // axes
    let (left, right) = (MARGIN, WIDTH - MARGIN);
    let (top, bottom) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{left} {top} V{bottom} H{right}" fill="none" stroke="black"/>"#
    );
    for t in &plot.ticks {
        let x = frame.px(t.x);
        let _ = writeln!(
            out,
            r#"<line x1="{x:.2}" y1="{bottom}" x2="{x:.2}" y2="{:.2}" stroke="black"/>"#,
            bottom + 5.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{x:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            bottom + 18.0,
            xml_escape(&t.label)
        );
    }
    for (value, label) in [(frame.y0, frame.y0), (frame.y1, frame.y1)] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{label:.3}</text>"#,
            left - 4.0,
            frame.py(value) + 4.0
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 8.0,
        axis_title(plot)
    );

    // legend
    for (i, s) in plot.series.iter().enumerate() {
        let y = top + 14.0 * i as f64 + 4.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            out,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="{color}" stroke-width="2"/>"#,
            right - 120.0,
            right - 104.0
        );
        let label = match s.fill {
            Some(f) => format!("{} ({:.4})", s.model, f.area),
            None => s.model.clone(),
        };
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{}</text>"#,
            right - 100.0,
            y + 4.0,
            xml_escape(&label)
        );
    }
    out.push_str("</svg>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(())
}

fn polyline(frame: &Frame, x: &[f64], y: &[f64]) -> String {
    let mut pts = String::new();
    for (&xv, &yv) in x.iter().zip(y) {
        if xv.is_finite() && yv.is_finite() {
            let _ = write!(pts, "{:.2},{:.2} ", frame.px(xv), frame.py(yv));
        }
    }
    pts.trim_end().to_string()
}

fn axis_title(plot: &CurvePlot) -> &'static str {
    if plot.kind == CurveKind::Roc {
        return "false positive rate";
    }
    match plot.axis {
        CurveAxis::CostRatio => "cost ratio c",
        CurveAxis::LogOdds => "log-odds of c",
        CurveAxis::RescaledQuadratic => "-(1-c)^2/2",
        CurveAxis::RescaledLog => "ln c",
    }
}
