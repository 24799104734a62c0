use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use regretkit::ThresholdInterval;

mod commands;
mod parse;

#[derive(Debug, Parser)]
#[command(
    name = "regretkit",
    version,
    about = "Regret-based evaluation of binary probabilistic classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Brier, log loss, bounded scores, accuracy, AUC, net benefit and H-measures.
    Score(ScoreArgs),
    /// Regret, decision or ROC curves as JSON, CSV or SVG.
    Curve(CurveArgs),
    /// Calibration/refinement decompositions of Brier and log loss.
    Decompose(DecomposeArgs),
    /// Rank models by minimal regret across cost ratios.
    Rank(RankArgs),
    /// Synthetic eight-archetype benchmark table.
    Vickers(VickersArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// CSV file with a label and a score column; repeat for several models.
    #[arg(long = "input", short, required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "y_true")]
    label_col: String,
    #[arg(long, default_value = "y_pred")]
    score_col: String,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Directory that relative `--output` paths resolve against.
    #[arg(long, env = "REGRETKIT_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cost-ratio range `a:b` (or `odds=1:100,1:5`) for the bounded scores.
    #[arg(long = "range", value_parser = parse::interval)]
    ranges: Vec<ThresholdInterval>,
    /// Threshold for accuracy.
    #[arg(long = "tau", value_parser = parse::cost)]
    taus: Vec<f64>,
    /// Threshold for net benefit.
    #[arg(long = "nb-tau", value_parser = parse::threshold)]
    nb_taus: Vec<f64>,
    /// Beta weight `α,β` for an H-measure.
    #[arg(long = "beta", value_parser = parse::beta)]
    betas: Vec<(f64, f64)>,
    /// Clamp scores to `[ε, 1−ε]` before log loss.
    #[arg(long)]
    clamp: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Brier,
    Logloss,
    Decision,
    Roc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Cost,
    LogOdds,
    RescaledQuadratic,
    RescaledLog,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CurveFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "cost")]
    axis: AxisArg,
    /// Cost-ratio range to draw.
    #[arg(long, value_parser = parse::interval, default_value = "0.01:0.99")]
    draw_range: ThresholdInterval,
    /// Cost-ratio range to shade; its area is reported.
    #[arg(long, value_parser = parse::interval)]
    fill_range: Option<ThresholdInterval>,
    /// Tick positions, `0.1,0.5` or `odds=1:9,1:1`.
    #[arg(long, value_parser = parse::cost_list_arg)]
    ticks: Option<parse::CostList>,
    #[arg(long, value_enum, default_value = "json")]
    format: CurveFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct DecomposeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Include the isotonic reliability step function.
    #[arg(long)]
    reliability: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Cost ratios to rank at; defaults to 0.01, 0.02, …, 0.99.
    #[arg(long, value_parser = parse::cost_list_arg)]
    grid: Option<parse::CostList>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct VickersArgs {
    /// Cohort size.
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0.2)]
    prevalence: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Log-odds shift of the under- and overestimating models.
    #[arg(long)]
    shift: Option<f64>,
    /// Log-odds shift of the severely miscalibrated models.
    #[arg(long)]
    severe_shift: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    format: TableFormat,
    #[command(flatten)]
    output: OutputArgs,
}

/// Failure with its exit status: 1 for invalid input, 2 for I/O.
#[derive(Debug)]
enum CliError {
    Invalid(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Io(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Invalid(m) | CliError::Io(m) => m,
        }
    }

    fn from_lib(context: Option<&Path>, e: regretkit::Error) -> Self {
        let msg = match context {
            Some(p) => format!("{}: {e}", p.display()),
            None => e.to_string(),
        };
        if e.is_io() {
            CliError::Io(msg)
        } else {
            CliError::Invalid(msg)
        }
    }
}

impl From<regretkit::Error> for CliError {
    fn from(e: regretkit::Error) -> Self {
        CliError::from_lib(None, e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let (bytes, output) = match cli.command {
        Command::Score(args) => (commands::score(&args)?, args.output),
        Command::Curve(args) => (commands::curve(&args)?, args.output),
        Command::Decompose(args) => (commands::decompose(&args)?, args.output),
        Command::Rank(args) => (commands::rank(&args)?, args.output),
        Command::Vickers(args) => (commands::vickers(&args)?, args.output),
    };
    write_output(&output, &bytes)
}

fn write_output(out: &OutputArgs, bytes: &[u8]) -> CliResult<()> {
    let io = |p: &Path, e: std::io::Error| CliError::Io(format!("{}: {e}", p.display()));
    match &out.output {
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
        Some(path) => {
            let path = match &out.output_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| io(parent, e))?;
            }
            fs::write(&path, bytes).map_err(|e| io(&path, e))
        }
    }
}
