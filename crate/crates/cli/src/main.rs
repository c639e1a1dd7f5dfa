use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anova_gbdt::data::write_csv;
use anova_gbdt::synthetic::{generate, SyntheticSpec};
use anova_gbdt_cli::{
    cmd_cv, cmd_predict, cmd_report, cmd_run, cmd_select, cmd_sweep_k, Artifacts, CliError,
    PipelineConfig, PipelineReport, PredictOptions,
};
use clap::{Args, Parser, Subcommand};

/// ANOVA feature selection and gradient-boosted trees on CSV feature matrices.
#[derive(Parser)]
#[command(name = "anova-gbdt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Split, select, train, and report validation and test metrics.
    Run(PipelineArgs),
    /// Stratified k-fold cross-validation.
    Cv(PipelineArgs),
    /// Validation accuracy for each k in --k-list.
    SweepK(PipelineArgs),
    /// F-scores and the top-k features of the training split.
    Select(PipelineArgs),
    /// Score a CSV file with a saved model.
    Predict(PredictArgs),
    /// Print a saved report.json as text.
    Report {
        /// Path to report.json.
        report: PathBuf,
    },
    /// Write a seeded synthetic feature CSV for trying the pipeline.
    Synth {
        /// three_class (1125 rows) or two_class (625 rows).
        #[arg(long, default_value = "three_class")]
        shape: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Settings given here override the config file.
#[derive(Args)]
struct PipelineArgs {
    /// key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Feature CSV with a label column.
    #[arg(long)]
    data: Option<String>,
    #[arg(long)]
    label_col: Option<String>,
    /// two_class or multi_class (default: from the data).
    #[arg(long)]
    task: Option<String>,
    /// Train, validation and test fractions, e.g. 0.6,0.2,0.2.
    #[arg(long)]
    split_ratios: Option<String>,
    /// Number of selected features, or `all`.
    #[arg(long)]
    k_features: Option<String>,
    /// Comma-separated k values for sweep-k.
    #[arg(long)]
    k_list: Option<String>,
    #[arg(long)]
    trees: Option<String>,
    #[arg(long)]
    learning_rate: Option<String>,
    /// 0 for unlimited depth.
    #[arg(long, allow_hyphen_values = true)]
    max_depth: Option<String>,
    #[arg(long)]
    num_leaves: Option<String>,
    #[arg(long)]
    min_samples_leaf: Option<String>,
    #[arg(long)]
    min_split_gain: Option<String>,
    /// GOSS top rate; 1 disables sampling.
    #[arg(long)]
    goss_a: Option<String>,
    /// GOSS rate of the remaining rows; 0 when goss-a is 1.
    #[arg(long)]
    goss_b: Option<String>,
    #[arg(long)]
    max_bin: Option<String>,
    /// true or false.
    #[arg(long)]
    bundling: Option<String>,
    /// Largest conflict rate tolerated inside a feature bundle.
    #[arg(long)]
    efb_conflict: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    folds: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
}

impl PipelineArgs {
    fn resolve(self) -> Result<PipelineConfig, CliError> {
        let pairs = [
            ("data", self.data),
            ("label_col", self.label_col),
            ("task", self.task),
            ("split_ratios", self.split_ratios),
            ("k_features", self.k_features),
            ("k_list", self.k_list),
            ("trees", self.trees),
            ("learning_rate", self.learning_rate),
            ("max_depth", self.max_depth),
            ("num_leaves", self.num_leaves),
            ("min_samples_leaf", self.min_samples_leaf),
            ("min_split_gain", self.min_split_gain),
            ("goss_a", self.goss_a),
            ("goss_b", self.goss_b),
            ("max_bin", self.max_bin),
            ("bundling", self.bundling),
            ("efb_conflict", self.efb_conflict),
            ("seed", self.seed),
            ("folds", self.folds),
            ("out", self.out),
        ];
        let overrides: Vec<(String, String)> = pairs
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
            .collect();
        PipelineConfig::resolve(self.config.as_deref(), &overrides)
    }
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model file.
    #[arg(long)]
    model: PathBuf,
    /// CSV with the model's feature columns.
    #[arg(long)]
    data: PathBuf,
    /// Predictions CSV (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ignored if present in the input.
    #[arg(long, default_value = "label")]
    label_col: String,
    /// Skip input columns the model does not use.
    #[arg(long)]
    ignore_extra: bool,
}

/// Writes to standard output, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(format!(
            "cannot write to standard output: {e}"
        ))),
        _ => Ok(()),
    }
}

fn pipeline(
    args: PipelineArgs,
    command: fn(&PipelineConfig) -> Result<Artifacts, CliError>,
) -> Result<(), CliError> {
    let cfg = args.resolve()?;
    let start = Instant::now();
    let artifacts = command(&cfg)?;
    artifacts.write(&cfg.out)?;
    if let Some(report) = artifacts.get("report.json") {
        emit(&PipelineReport::from_json(report)?.render())?;
    }
    let names: Vec<&str> = artifacts.files.iter().map(|(n, _)| n.as_str()).collect();
    eprintln!(
        "wrote {} to {} in {:.1?}",
        names.join(", "),
        cfg.out.display(),
        start.elapsed()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(a) => pipeline(a, cmd_run),
        Command::Cv(a) => pipeline(a, cmd_cv),
        Command::SweepK(a) => pipeline(a, cmd_sweep_k),
        Command::Select(a) => pipeline(a, cmd_select),
        Command::Predict(a) => {
            let opts = PredictOptions {
                label_col: a.label_col,
                ignore_extra: a.ignore_extra,
            };
            let csv = cmd_predict(&a.model, &a.data, &opts)?;
            match a.out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
                None => emit(&csv),
            }
        }
        Command::Report { report } => emit(&cmd_report(&report)?),
        Command::Synth { shape, seed, out } => {
            let mut spec = match shape.as_str() {
                "three_class" => SyntheticSpec::three_class(),
                "two_class" => SyntheticSpec::two_class(),
                other => {
                    return Err(CliError::Config(format!(
                        "unknown shape `{other}` (three_class or two_class)"
                    )))
                }
            };
            if let Some(seed) = seed {
                spec.seed = seed;
            }
            write_csv(&generate(&spec), &out, "label").map_err(|e| CliError::Config(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
