use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use regretkit::calibration::{
    brier_decomposition, log_loss_decomposition, pav_fit, Block, DecompositionReport,
};
use regretkit::curves::{build_curve, emit, CurveAxis, CurveKind, CurveSpec, Format};
use regretkit::dataset::CsvSchema;
use regretkit::dca::{bounded_net_benefit, net_benefit};
use regretkit::hmeasure::{default_grid, h_measure, rank_models, WeightSpec};
use regretkit::ranking::auc_roc;
use regretkit::regret::{accuracy, CostRatio};
use regretkit::scoring::{bounded_brier, bounded_log_loss, brier, log_loss, Weighting};
use regretkit::vickers::{
    analytic_row, benchmark_table, ordering_check, Archetype, ArchetypeParams, BenchmarkConfig,
};
use regretkit::{Error, LabeledScores, ThresholdInterval};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    AxisArg, CliError, CliResult, CurveArgs, CurveFormat, DecomposeArgs, InputArgs, KindArg,
    RankArgs, ReportFormat, ScoreArgs, TableFormat, VickersArgs,
};

struct Model {
    name: String,
    path: PathBuf,
    data: LabeledScores,
}

fn load(input: &InputArgs) -> CliResult<Vec<Model>> {
    let schema = CsvSchema::new(&input.label_col, &input.score_col);
    let mut models: Vec<Model> = Vec::new();
    for path in &input.inputs {
        let file =
            File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let data = LabeledScores::load_csv(BufReader::new(file), &schema)
            .map_err(|e| CliError::from_lib(Some(path), e))?;
        models.push(Model {
            name: model_name(path),
            path: path.clone(),
            data,
        });
    }
    let clash = |m: &Model| models.iter().filter(|o| o.name == m.name).count() > 1;
    let names: Vec<String> = models
        .iter()
        .map(|m| {
            if clash(m) {
                m.path.display().to_string()
            } else {
                m.name.clone()
            }
        })
        .collect();
    for (m, name) in models.iter_mut().zip(names) {
        m.name = name;
    }
    Ok(models)
}

fn model_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Finite numbers as JSON numbers, infinities as strings, missing as null.
fn num(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        Some(x) if x.is_nan() => json!("nan"),
        Some(x) if x > 0.0 => json!("inf"),
        Some(_) => json!("-inf"),
        None => Value::Null,
    }
}

fn text_num(v: Option<f64>) -> String {
    match v {
        Some(x) if x.is_finite() => format!("{x:.6}"),
        Some(x) if x.is_nan() => "nan".to_string(),
        Some(x) if x > 0.0 => "inf".to_string(),
        Some(_) => "-inf".to_string(),
        None => "n/a".to_string(),
    }
}

fn to_json(value: &impl Serialize) -> CliResult<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)
        .map_err(|e| CliError::Invalid(format!("serializing output: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

/// Metrics that are undefined for this input rather than wrong.
fn optional(r: regretkit::Result<f64>) -> CliResult<Option<f64>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(
            Error::DegenerateClass(_)
            | Error::IntervalAtBoundary { .. }
            | Error::NonIntegrable { .. },
        ) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn range_label(iv: ThresholdInterval) -> String {
    format!("[{}:{}]", iv.a(), iv.b())
}

struct Metric {
    label: String,
    name: &'static str,
    tau: Option<f64>,
    interval: Option<ThresholdInterval>,
    weighting: Option<Weighting>,
    value: Option<f64>,
}

impl Metric {
    fn new(name: &'static str, value: Option<f64>) -> Self {
        Self {
            label: name.to_string(),
            name,
            tau: None,
            interval: None,
            weighting: None,
            value,
        }
    }

    fn at(mut self, tau: f64) -> Self {
        self.label = format!("{}@{tau}", self.name);
        self.tau = Some(tau);
        self
    }

    fn over(mut self, iv: ThresholdInterval, weighting: Weighting) -> Self {
        self.label = format!("{}{}", self.name, range_label(iv));
        self.interval = Some(iv);
        self.weighting = Some(weighting);
        self
    }

    fn json(&self) -> Value {
        let mut obj = json!({ "metric": self.name, "value": num(self.value) });
        if let Some(t) = self.tau {
            obj["tau"] = json!(t);
        }
        if let Some(iv) = self.interval {
            obj["interval"] = json!({ "a": iv.a(), "b": iv.b() });
        }
        if let Some(w) = self.weighting {
            obj["weighting"] = serde_json::to_value(w).expect("weighting serializes");
        }
        obj
    }
}

fn score_metrics(d: &LabeledScores, args: &ScoreArgs) -> CliResult<Vec<Metric>> {
    let mut out = vec![
        Metric::new("brier", Some(brier(d))),
        Metric::new("log_loss", Some(log_loss(d, args.clamp))),
        Metric::new("auc_roc", optional(auc_roc(d))?),
    ];
    for &tau in &args.taus {
        out.push(Metric::new("accuracy", Some(accuracy(d, tau))).at(tau));
    }
    for &tau in &args.nb_taus {
        out.push(Metric::new("net_benefit", Some(net_benefit(d, tau)?)).at(tau));
    }
    for &iv in &args.ranges {
        out.push(
            Metric::new("bounded_brier", Some(bounded_brier(d, iv))).over(iv, Weighting::UniformC),
        );
        out.push(
            Metric::new("bounded_log_loss", optional(bounded_log_loss(d, iv))?)
                .over(iv, Weighting::LogOddsUniform),
        );
        out.push(
            Metric::new("bounded_net_benefit", optional(bounded_net_benefit(d, iv))?)
                .over(iv, Weighting::UniformC),
        );
    }
    for &(alpha, beta) in &args.betas {
        let mut m = Metric::new(
            "h_measure",
            Some(h_measure(d, &WeightSpec::beta(alpha, beta))?),
        );
        m.label = format!("h_measure[beta {alpha},{beta}]");
        m.weighting = Some(Weighting::Beta { alpha, beta });
        out.push(m);
    }
    Ok(out)
}

pub fn score(args: &ScoreArgs) -> CliResult<Vec<u8>> {
    if let Some(eps) = args.clamp {
        if !(eps > 0.0 && eps < 0.5) {
            return Err(CliError::Invalid(format!(
                "--clamp must lie in (0, 0.5), got {eps}"
            )));
        }
    }
    let models = load(&args.input)?;
    let metrics = models
        .iter()
        .map(|m| score_metrics(&m.data, args))
        .collect::<CliResult<Vec<_>>>()?;
    match args.format {
        ReportFormat::Json => {
            let models: Vec<Value> = models
                .iter()
                .zip(&metrics)
                .map(|(m, ms)| {
                    json!({
                        "model": m.name,
                        "path": m.path.display().to_string(),
                        "n": m.data.len(),
                        "prevalence": m.data.prevalence(),
                        "metrics": ms.iter().map(Metric::json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            to_json(&json!({ "schema": 1, "models": models }))
        }
        ReportFormat::Text => {
            let labels: Vec<&str> = metrics[0].iter().map(|m| m.label.as_str()).collect();
            let mut rows = vec![
                (
                    "n".to_string(),
                    models.iter().map(|m| m.data.len().to_string()).collect(),
                ),
                (
                    "prevalence".to_string(),
                    models
                        .iter()
                        .map(|m| text_num(Some(m.data.prevalence())))
                        .collect(),
                ),
            ];
            for (i, label) in labels.iter().enumerate() {
                rows.push((
                    label.to_string(),
                    metrics.iter().map(|ms| text_num(ms[i].value)).collect(),
                ));
            }
            let header: Vec<String> = models.iter().map(|m| m.name.clone()).collect();
            Ok(table("metric", &header, &rows).into_bytes())
        }
    }
}

/// Left-aligned first column, right-aligned value columns.
fn table(corner: &str, header: &[String], rows: &[(String, Vec<String>)]) -> String {
    let first = rows
        .iter()
        .map(|r| r.0.len())
        .chain([corner.len()])
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(j, h)| {
            rows.iter()
                .map(|r| r.1[j].len())
                .chain([h.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    let mut line = |first_cell: &str, cells: &[String]| {
        let _ = write!(out, "{first_cell:<first$}");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(out, "  {cell:>w$}");
        }
        out.push('\n');
    };
    line(corner, header);
    for (label, cells) in rows {
        line(label, cells);
    }
    out
}

pub fn curve(args: &CurveArgs) -> CliResult<Vec<u8>> {
    let spec = CurveSpec {
        kind: match args.kind {
            KindArg::Brier => CurveKind::Brier,
            KindArg::Logloss => CurveKind::LogLoss,
            KindArg::Decision => CurveKind::Decision,
            KindArg::Roc => CurveKind::Roc,
        },
        draw_range: args.draw_range,
        fill_range: args.fill_range,
        ticks: args.ticks.clone().map(|t| t.0).unwrap_or_default(),
        axis: match args.axis {
            AxisArg::Cost => CurveAxis::CostRatio,
            AxisArg::LogOdds => CurveAxis::LogOdds,
            AxisArg::RescaledQuadratic => CurveAxis::RescaledQuadratic,
            AxisArg::RescaledLog => CurveAxis::RescaledLog,
        },
    };
    spec.validate()?;
    let models = load(&args.input)?;
    let named: Vec<(&str, &LabeledScores)> =
        models.iter().map(|m| (m.name.as_str(), &m.data)).collect();
    let plot = build_curve(&named, &spec)?;
    let format = match args.format {
        CurveFormat::Json => Format::Json,
        CurveFormat::Csv => Format::Csv,
        CurveFormat::Svg => Format::Svg,
    };
    let mut out = Vec::new();
    emit(&plot, format, &mut out)?;
    Ok(out)
}

fn decomposition_rows(prefix: &str, r: &DecompositionReport) -> Vec<(String, Option<f64>)> {
    vec![
        (format!("{prefix}.total"), Some(r.total)),
        (format!("{prefix}.calibration"), Some(r.calibration_term)),
        (format!("{prefix}.refinement"), Some(r.refinement_term)),
        (format!("{prefix}.divergence"), Some(r.divergence_term)),
        (format!("{prefix}.cross_residual"), Some(r.cross_residual)),
    ]
}

fn decomposition_json(r: &DecompositionReport) -> Value {
    json!({
        "total": num(Some(r.total)),
        "calibration_term": num(Some(r.calibration_term)),
        "refinement_term": num(Some(r.refinement_term)),
        "divergence_term": num(Some(r.divergence_term)),
        "cross_residual": num(Some(r.cross_residual)),
    })
}

pub fn decompose(args: &DecomposeArgs) -> CliResult<Vec<u8>> {
    let models = load(&args.input)?;
    let results: Vec<(DecompositionReport, DecompositionReport, Vec<Block>)> = models
        .iter()
        .map(|m| {
            (
                brier_decomposition(&m.data),
                log_loss_decomposition(&m.data),
                pav_fit(&m.data).blocks,
            )
        })
        .collect();
    match args.format {
        ReportFormat::Json => {
            let models: Vec<Value> = models
                .iter()
                .zip(&results)
                .map(|(m, (b, l, blocks))| {
                    let mut obj = json!({
                        "model": m.name,
                        "n": m.data.len(),
                        "prevalence": m.data.prevalence(),
                        "brier": decomposition_json(b),
                        "log_loss": decomposition_json(l),
                    });
                    if args.reliability {
                        obj["reliability"] =
                            serde_json::to_value(blocks).expect("blocks serialize");
                    }
                    obj
                })
                .collect();
            to_json(&json!({ "schema": 1, "models": models }))
        }
        ReportFormat::Text => {
            let header: Vec<String> = models.iter().map(|m| m.name.clone()).collect();
            let per_model: Vec<Vec<(String, Option<f64>)>> = results
                .iter()
                .map(|(b, l, _)| {
                    let mut rows = decomposition_rows("brier", b);
                    rows.extend(decomposition_rows("log_loss", l));
                    rows
                })
                .collect();
            let rows: Vec<(String, Vec<String>)> = (0..per_model[0].len())
                .map(|i| {
                    (
                        per_model[0][i].0.clone(),
                        per_model.iter().map(|r| text_num(r[i].1)).collect(),
                    )
                })
                .collect();
            let mut out = table("term", &header, &rows);
            if args.reliability {
                for (m, (_, _, blocks)) in models.iter().zip(&results) {
                    let _ = writeln!(out, "\nreliability: {}", m.name);
                    let _ = writeln!(
                        out,
                        "{:>12} {:>12} {:>12} {:>8} {:>8}",
                        "lo", "hi", "value", "count", "pos"
                    );
                    for b in blocks {
                        let _ = writeln!(
                            out,
                            "{:>12.6} {:>12.6} {:>12.6} {:>8} {:>8}",
                            b.lo, b.hi, b.value, b.count, b.positives
                        );
                    }
                }
            }
            Ok(out.into_bytes())
        }
    }
}

pub fn rank(args: &RankArgs) -> CliResult<Vec<u8>> {
    let grid = match &args.grid {
        Some(cs) => {
            cs.0.iter()
                .map(|&c| CostRatio::new(c))
                .collect::<regretkit::Result<Vec<_>>>()?
        }
        None => default_grid(),
    };
    let models = load(&args.input)?;
    let data: Vec<LabeledScores> = models.iter().map(|m| m.data.clone()).collect();
    let ranking = rank_models(&data, &grid)?;
    let h: Vec<f64> = data
        .iter()
        .map(|d| h_measure(d, &WeightSpec::uniform()))
        .collect::<regretkit::Result<_>>()?;
    let mean_rank: Vec<f64> = (0..models.len())
        .map(|m| ranking.ranks_of(m).iter().sum::<usize>() as f64 / ranking.grid.len() as f64)
        .collect();
    match args.format {
        ReportFormat::Json => {
            let names: Vec<&str> = models.iter().map(|m| m.name.as_str()).collect();
            to_json(&json!({
                "schema": 1,
                "models": names,
                "h_uniform": h,
                "mean_rank": mean_rank,
                "grid": ranking.grid,
                "regret": ranking.regret,
                "order": ranking.order,
            }))
        }
        ReportFormat::Text => {
            let header: Vec<String> = models
                .iter()
                .flat_map(|m| [format!("R*({})", m.name), format!("rank({})", m.name)])
                .collect();
            let mut rows: Vec<(String, Vec<String>)> = ranking
                .grid
                .iter()
                .enumerate()
                .map(|(k, c)| {
                    let cells = (0..models.len())
                        .flat_map(|m| {
                            [
                                text_num(Some(ranking.regret[k][m])),
                                ranking.rank(k, m).to_string(),
                            ]
                        })
                        .collect();
                    (format!("{c}"), cells)
                })
                .collect();
            rows.push((
                "h_uniform".to_string(),
                h.iter()
                    .flat_map(|&v| [text_num(Some(v)), String::new()])
                    .collect(),
            ));
            rows.push((
                "mean_rank".to_string(),
                mean_rank
                    .iter()
                    .flat_map(|&v| [String::new(), format!("{v:.3}")])
                    .collect(),
            ));
            Ok(table("c", &header, &rows).into_bytes())
        }
    }
}

pub fn vickers(args: &VickersArgs) -> CliResult<Vec<u8>> {
    let defaults = ArchetypeParams::default();
    let config = BenchmarkConfig {
        n: args.n,
        prevalence: args.prevalence,
        seed: args.seed,
        params: ArchetypeParams {
            shift: args.shift.unwrap_or(defaults.shift),
            severe_shift: args.severe_shift.unwrap_or(defaults.severe_shift),
            ..defaults
        },
        ..BenchmarkConfig::default()
    };
    let table = benchmark_table(&config)?;
    let check = ordering_check(&table);
    let analytic: Vec<_> = [Archetype::AssumeAllNegative, Archetype::AssumeAllPositive]
        .into_iter()
        .filter_map(|a| analytic_row(a, args.prevalence))
        .collect();
    let mut out = Vec::new();
    match args.format {
        TableFormat::Text => {
            table.write_text(&mut out)?;
            let verdict = if check.agrees { "agree" } else { "disagree" };
            let mut text = format!(
                "NB@5% and bounded-Brier orderings (excluding assume-all-positive): {verdict}\n\n\
                 exact values at prevalence {}\n",
                args.prevalence
            );
            for r in &analytic {
                let _ = writeln!(
                    text,
                    "{:<26} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>8.4} {:>14.4}",
                    r.archetype.name(),
                    r.auc_roc,
                    r.brier,
                    r.net_benefit[0],
                    r.net_benefit[1],
                    r.net_benefit[2],
                    r.bounded_brier
                );
            }
            out.extend_from_slice(text.as_bytes());
        }
        TableFormat::Csv => table.write_csv(&mut out)?,
        TableFormat::Json => {
            out = to_json(&json!({ "table": table, "ordering": check, "analytic": analytic }))?
        }
    }
    Ok(out)
}
