//! `survkit` — command-line front end for the survival toolkit.
//!
//! Exit codes: 0 success, 1 runtime failure (fit divergence, no comparable
//! pairs, unwritable outputs), 2 invalid input or configuration. Every
//! stochastic step is driven by an explicit `--seed`, so reruns are
//! byte-reproducible.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use survkit_core::artifact::ModelArtifact;
use survkit_core::cox::{baseline_cumhaz, fit_cox, CoxConfig, TieMethod};
use survkit_core::data::{load_csv, save_csv, standardize, train_test_split, SurvivalDataset};
use survkit_core::deepsurv::{fit_deepsurv, Activation, NetworkSpec};
use survkit_core::error::Error as CoreError;
use survkit_core::forest::{fit_rsf, RSFConfig};
use survkit_core::km::{
    fit_km, plot_points_csv, render_summary_table, summarize_at, summary_csv,
};
use survkit_core::ksvm::{fit_ksvm, KSVMConfig, KernelKind, KernelSpec};
use survkit_core::metrics::{compare_models, render_comparison, RiskScorer, SplitMeta, TieCredit};
use survkit_core::mtlr::{fit_mtlr, make_time_grid, weight_matrix, weight_matrix_csv, MTLRConfig};
use survkit_core::ols::{fit_ols, render_ols, DEFAULT_MVI_REGRESSORS};
use survkit_core::synth::{generate_weibull, table1_replica, CovariateLaw, WeibullConfig};

#[derive(Parser)]
#[command(name = "survkit", version, about = "Survival-analysis toolkit for right-censored time-to-event data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a CSV file and report its shape
    Ingest(IngestArgs),
    /// Kaplan-Meier summary table, CSV and step-plot points
    Km(KmArgs),
    /// Fit one model and write its JSON artifact
    #[command(subcommand)]
    Fit(FitCommand),
    /// Score rows of a CSV with a saved model artifact
    Predict(PredictArgs),
    /// Fit several models on a seeded split and compare held-out concordance
    Compare(CompareArgs),
    /// Export the per-time weight matrix of a fitted MTLR artifact
    Weights(WeightsArgs),
    /// Ordinary least squares of a response column with the inference block
    RegressMvi(RegressArgs),
    /// Write synthetic cohorts
    #[command(subcommand)]
    Synth(SynthCommand),
    /// Load, split, standardize, fit, evaluate and write all report artifacts
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct IngestArgs {
    /// Input CSV (`id,time,status,<features...>[,mvi]`)
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct KmArgs {
    #[arg(long)]
    input: PathBuf,
    /// Query times (comma-separated months); defaults to the event times
    #[arg(long, value_delimiter = ',')]
    times: Vec<u32>,
    /// Confidence level for the log-type intervals
    #[arg(long, default_value_t = 0.95)]
    level: f64,
    /// Directory for km_summary.csv and km_curve.csv
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum FitCommand {
    /// Cox proportional hazards (Newton-Raphson partial likelihood)
    Cox(FitCoxArgs),
    /// Discrete-time multi-task logistic regression
    Mtlr(FitMtlrArgs),
    /// Random survival forest with log-rank splitting
    Rsf(FitRsfArgs),
    /// Neural Cox model
    Deepsurv(FitDeepsurvArgs),
    /// Ranking kernel SVM over comparable pairs
    Ksvm(FitKsvmArgs),
}

#[derive(Args)]
struct FitCommonArgs {
    #[arg(long)]
    input: PathBuf,
    /// Artifact path (JSON)
    #[arg(long)]
    out: PathBuf,
    /// Fit on raw covariates instead of standardizing first
    #[arg(long)]
    raw: bool,
}

#[derive(Args)]
struct FitCoxArgs {
    #[command(flatten)]
    common: FitCommonArgs,
    #[arg(long, default_value = "efron")]
    ties: String,
    #[arg(long, default_value_t = 25)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Optional ridge stabilizer for degenerate designs
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
}

#[derive(Args)]
struct FitMtlrArgs {
    #[command(flatten)]
    common: FitCommonArgs,
    /// Number of time-grid boundaries (collapses to the distinct event count)
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[arg(long, default_value_t = 1.0)]
    reg_c: f64,
}

#[derive(Args)]
struct FitRsfArgs {
    #[command(flatten)]
    common: FitCommonArgs,
    #[arg(long, default_value_t = 200)]
    trees: usize,
    /// Features sampled per node; defaults to ceil(sqrt(p))
    #[arg(long)]
    mtry: Option<usize>,
    #[arg(long, default_value_t = 3)]
    min_node_events: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitDeepsurvArgs {
    #[command(flatten)]
    common: FitCommonArgs,
    /// Hidden layer widths, e.g. 16,16; empty string for a linear model
    #[arg(long, default_value = "16,16")]
    hidden: String,
    #[arg(long, default_value = "relu")]
    activation: String,
    #[arg(long, default_value_t = 1e-2)]
    lr: f64,
    #[arg(long, default_value_t = 2000)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-4)]
    weight_decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct FitKsvmArgs {
    #[command(flatten)]
    common: FitCommonArgs,
    #[arg(long, default_value = "rbf")]
    kernel: String,
    /// RBF width; defaults to 1/p
    #[arg(long)]
    gamma: Option<f64>,
    /// Pairwise hinge weight (the C trade-off)
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 3)]
    degree: u32,
    #[arg(long, default_value_t = 0.0)]
    coef0: f64,
    #[arg(long, default_value_t = 500)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    /// Model artifact written by `fit`
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    /// Output CSV (`id,risk_score`); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    input: PathBuf,
    /// Models to fit, comma-separated subset of cox,mtlr,rsf,deepsurv,ksvm
    #[arg(long, value_delimiter = ',', default_value = "cox,mtlr,rsf,deepsurv,ksvm")]
    models: Vec<String>,
    /// Train fraction
    #[arg(long, default_value_t = 0.7)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report JSON path; stdout text otherwise
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-data CSV (`model,c_index`)
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Credit for tied risk scores: half (Harrell) or zero (formula-literal)
    #[arg(long, default_value = "half")]
    tie_credit: String,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct WeightsArgs {
    /// MTLR artifact path
    #[arg(long)]
    model: PathBuf,
    /// Output CSV (`feature,boundary_time,weight`); stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RegressArgs {
    #[arg(long)]
    input: PathBuf,
    /// Response column (default `mvi`)
    #[arg(long, default_value = "mvi")]
    response: String,
    /// Regressor columns, comma-separated; defaults to the nine
    /// reference risk/vulnerability columns
    #[arg(long, value_delimiter = ',')]
    regressors: Vec<String>,
    /// Path prefix: writes `<out>.txt` and `<out>.json`
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Deterministic 22-subject cohort replicating the published summary table
    Table1 {
        /// Output CSV; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Proportional-hazards cohort with Weibull baseline
    Weibull(SynthWeibullArgs),
}

#[derive(Args)]
struct SynthWeibullArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// True coefficients, comma-separated
    #[arg(long, default_value = "0.8,-0.5,0.0")]
    beta: String,
    #[arg(long, default_value_t = 1.5)]
    shape: f64,
    #[arg(long, default_value_t = 110.0)]
    scale: f64,
    /// Administrative censoring horizon in months
    #[arg(long, default_value_t = 120)]
    censor: u32,
    /// Covariate law: normal or uniform
    #[arg(long, default_value = "normal")]
    law: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory for report.json, km_summary.csv, artifacts
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    models: Vec<String>,
    #[arg(long)]
    split: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key=value config file; flags win on conflict
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

/// Errors raised while reading or validating inputs: exit 2.
fn input_stage(err: CoreError) -> CliError {
    CliError::validation(err.to_string())
}

/// Errors raised while fitting or writing outputs: validation errors keep
/// exit 2, everything else is a runtime failure (exit 1).
fn run_stage(err: CoreError) -> CliError {
    if err.is_validation() {
        CliError::validation(err.to_string())
    } else {
        CliError::runtime(err.to_string())
    }
}

fn write_output(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn load_input(path: &Path) -> Result<SurvivalDataset, CliError> {
    load_csv(path).map_err(input_stage)
}


/// Writes to stdout, exiting quietly when the consumer closed the pipe.
fn emit(text: &str) {
    use std::io::Write;
    let mut stdout = std::io::stdout();
    if stdout.write_all(text.as_bytes()).is_err() || stdout.flush().is_err() {
        std::process::exit(0);
    }
}

fn emitln(text: &str) {
    emit(text);
    emit("\n");
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Km(args) => cmd_km(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Weights(args) => cmd_weights(args),
        Command::RegressMvi(args) => cmd_regress(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    }
}

fn cmd_ingest(args: IngestArgs) -> Result<(), CliError> {
    let ds = load_input(&args.input)?;
    match args.format {
        Format::Json => {
            let summary = serde_json::json!({
                "schema_version": 1,
                "rows": ds.n(),
                "events": ds.n_events(),
                "censored": ds.n_censored(),
                "features": ds.feature_names(),
                "has_missing_covariates": ds.rows().iter().any(|r| !r.is_complete()),
                "has_mvi": ds.rows().iter().any(|r| r.mvi.is_some()),
            });
            emitln(&serde_json::to_string_pretty(&summary).unwrap());
        }
        _ => {
            emitln(&format!(
                "{}: {} rows ({} events, {} censored), {} covariates",
                args.input.display(),
                ds.n(),
                ds.n_events(),
                ds.n_censored(),
                ds.p()
            ));
            emitln(&format!("features: {}", ds.feature_names().join(", ")));
        }
    }
    Ok(())
}

fn cmd_km(args: KmArgs) -> Result<(), CliError> {
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::validation("confidence level must be inside (0,1)"));
    }
    let ds = load_input(&args.input)?;
    let curve = fit_km(&ds).map_err(run_stage)?;
    let times = if args.times.is_empty() {
        curve.steps.iter().map(|s| s.time).collect()
    } else {
        args.times.clone()
    };
    let rows = summarize_at(&curve, &times, args.level).map_err(input_stage)?;

    match args.format {
        Format::Text => emit(&render_summary_table(&rows, args.level)),
        Format::Csv => emit(&summary_csv(&rows)),
        Format::Json => emitln(
            &serde_json::to_string_pretty(&serde_json::json!({
                "schema_version": 1,
                "level": args.level,
                "rows": rows,
            }))
            .unwrap(),
        ),
    }
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        write_output(&dir.join("km_summary.csv"), &summary_csv(&rows))?;
        write_output(&dir.join("km_curve.csv"), &plot_points_csv(&curve, args.level))?;
    }
    Ok(())
}

/// Loads and (unless `raw`) standardizes a training file, returning the
/// fitting dataset plus the scaling to embed in the artifact.
fn prepare_training(
    common: &FitCommonArgs,
) -> Result<(SurvivalDataset, Option<survkit_core::data::ScalingParams>), CliError> {
    let ds = load_input(&common.input)?;
    if common.raw {
        ds.require_complete_covariates().map_err(input_stage)?;
        Ok((ds, None))
    } else {
        let (train_s, _, params) = standardize(&ds, &ds).map_err(input_stage)?;
        Ok((train_s, Some(params)))
    }
}

fn cmd_fit(command: FitCommand) -> Result<(), CliError> {
    let (artifact, out) = match command {
        FitCommand::Cox(args) => {
            let (train, scaling) = prepare_training(&args.common)?;
            let ties = match args.ties.as_str() {
                "efron" => TieMethod::Efron,
                "breslow" => TieMethod::Breslow,
                other => {
                    return Err(CliError::validation(format!(
                        "unknown tie method `{other}` (efron|breslow)"
                    )))
                }
            };
            let cfg = CoxConfig {
                max_iter: args.max_iter,
                tol: args.tol,
                ties,
                ridge: args.ridge,
            };
            let mut model = fit_cox(&train, &cfg).map_err(run_stage)?;
            model.baseline = Some(baseline_cumhaz(&model, &train).map_err(run_stage)?);
            (ModelArtifact::from_cox(&model, scaling), args.common.out)
        }
        FitCommand::Mtlr(args) => {
            let (train, scaling) = prepare_training(&args.common)?;
            let grid = make_time_grid(&train, args.bins).map_err(run_stage)?;
            let model =
                fit_mtlr(&train, &grid, args.reg_c, &MTLRConfig::default()).map_err(run_stage)?;
            (ModelArtifact::from_mtlr(&model, scaling), args.common.out)
        }
        FitCommand::Rsf(args) => {
            let (train, scaling) = prepare_training(&args.common)?;
            let cfg = RSFConfig {
                n_trees: args.trees,
                mtry: args.mtry,
                min_node_events: args.min_node_events,
                max_depth: args.max_depth,
                seed: args.seed,
            };
            let model = fit_rsf(&train, &cfg).map_err(run_stage)?;
            (ModelArtifact::from_rsf(&model, scaling), args.common.out)
        }
        FitCommand::Deepsurv(args) => {
            let (train, scaling) = prepare_training(&args.common)?;
            let spec = NetworkSpec {
                hidden_sizes: parse_usize_list(&args.hidden)?,
                activation: parse_activation(&args.activation)?,
                weight_decay: args.weight_decay,
                learning_rate: args.lr,
                epochs: args.epochs,
                seed: args.seed,
            };
            let model = fit_deepsurv(&train, &spec).map_err(run_stage)?;
            (ModelArtifact::from_deepsurv(&model, scaling), args.common.out)
        }
        FitCommand::Ksvm(args) => {
            let (train, scaling) = prepare_training(&args.common)?;
            let kernel = parse_kernel(&args.kernel, args.gamma, args.degree, args.coef0, train.p())?;
            let cfg = KSVMConfig {
                epochs: args.epochs,
                seed: args.seed,
                ..KSVMConfig::default()
            };
            let model = fit_ksvm(&train, &kernel, args.c, &cfg).map_err(run_stage)?;
            (ModelArtifact::from_ksvm(&model, scaling), args.common.out)
        }
    };
    artifact.save(&out).map_err(run_stage)?;
    emitln(&format!("wrote {} artifact to {}", artifact.model_name(), out.display()));
    Ok(())
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>, CliError> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| CliError::validation(format!("bad layer width `{t}`")))
        })
        .collect()
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| CliError::validation(format!("bad number `{t}`")))
        })
        .collect()
}

fn parse_activation(text: &str) -> Result<Activation, CliError> {
    match text {
        "relu" | "rectifier" => Ok(Activation::Rectifier),
        "tanh" => Ok(Activation::Tanh),
        other => Err(CliError::validation(format!(
            "unknown activation `{other}` (relu|tanh)"
        ))),
    }
}

fn parse_kernel(
    kind: &str,
    gamma: Option<f64>,
    degree: u32,
    coef0: f64,
    p: usize,
) -> Result<KernelSpec, CliError> {
    let kind = match kind {
        "linear" => KernelKind::Linear,
        "rbf" => KernelKind::Rbf,
        "poly" | "polynomial" => KernelKind::Polynomial,
        other => {
            return Err(CliError::validation(format!(
                "unknown kernel `{other}` (linear|rbf|poly)"
            )))
        }
    };
    Ok(KernelSpec {
        kind,
        gamma: gamma.unwrap_or(1.0 / p.max(1) as f64),
        degree,
        coef0,
    })
}

fn cmd_predict(args: PredictArgs) -> Result<(), CliError> {
    let artifact = ModelArtifact::load(&args.model).map_err(input_stage)?;
    let ds = load_input(&args.input)?;
    ds.require_complete_covariates().map_err(input_stage)?;

    // dimension/name checks against either the stored scaling or the raw
    // artifact feature list
    if let Some(scaling) = artifact.scaling() {
        if !scaling.source_names.is_empty() && ds.feature_names() != scaling.source_names {
            return Err(CliError::validation(
                "input feature names do not match the columns the model was fitted on",
            ));
        }
    } else if ds.feature_names() != artifact.features() {
        return Err(CliError::validation(
            "input feature names do not match the model's features",
        ));
    }

    let mut out = String::from("id,risk_score\n");
    for row in ds.rows() {
        let score = artifact.risk_raw(&row.x).map_err(run_stage)?;
        out.push_str(&format!("{},{}\n", row.id, score));
    }
    match &args.out {
        Some(path) => write_output(path, &out)?,
        None => emit(&out),
    }
    Ok(())
}

const KNOWN_MODELS: [&str; 5] = ["cox", "mtlr", "rsf", "deepsurv", "ksvm"];

/// Fits one model by name with its default configuration, returning the
/// artifact (carrying `scaling`) and a scorer over standardized covariates.
fn fit_by_name(
    name: &str,
    train_s: &SurvivalDataset,
    scaling: &survkit_core::data::ScalingParams,
    seed: u64,
) -> Result<(ModelArtifact, Box<dyn RiskScorer>), CliError> {
    match name {
        "cox" => {
            let mut model = fit_cox(train_s, &CoxConfig::default()).map_err(run_stage)?;
            model.baseline = Some(baseline_cumhaz(&model, train_s).map_err(run_stage)?);
            let artifact = ModelArtifact::from_cox(&model, Some(scaling.clone()));
            Ok((artifact, Box::new(model)))
        }
        "mtlr" => {
            let grid = make_time_grid(train_s, 10).map_err(run_stage)?;
            let model = fit_mtlr(train_s, &grid, 1.0, &MTLRConfig::default()).map_err(run_stage)?;
            let artifact = ModelArtifact::from_mtlr(&model, Some(scaling.clone()));
            Ok((artifact, Box::new(model)))
        }
        "rsf" => {
            let model = fit_rsf(
                train_s,
                &RSFConfig {
                    seed,
                    ..RSFConfig::default()
                },
            )
            .map_err(run_stage)?;
            let artifact = ModelArtifact::from_rsf(&model, Some(scaling.clone()));
            Ok((artifact, Box::new(model)))
        }
        "deepsurv" => {
            let model = fit_deepsurv(
                train_s,
                &NetworkSpec {
                    seed,
                    ..NetworkSpec::default()
                },
            )
            .map_err(run_stage)?;
            let artifact = ModelArtifact::from_deepsurv(&model, Some(scaling.clone()));
            Ok((artifact, Box::new(model)))
        }
        "ksvm" => {
            let kernel = KernelSpec::rbf(1.0 / train_s.p().max(1) as f64);
            let model = fit_ksvm(
                train_s,
                &kernel,
                1.0,
                &KSVMConfig {
                    seed,
                    ..KSVMConfig::default()
                },
            )
            .map_err(run_stage)?;
            let artifact = ModelArtifact::from_ksvm(&model, Some(scaling.clone()));
            Ok((artifact, Box::new(model)))
        }
        other => Err(CliError::validation(format!(
            "unknown model `{other}` (expected one of {})",
            KNOWN_MODELS.join(",")
        ))),
    }
}

fn validate_models(models: &[String]) -> Result<(), CliError> {
    if models.is_empty() {
        return Err(CliError::validation("no models requested"));
    }
    for m in models {
        if !KNOWN_MODELS.contains(&m.as_str()) {
            return Err(CliError::validation(format!(
                "unknown model `{m}` (expected one of {})",
                KNOWN_MODELS.join(",")
            )));
        }
    }
    Ok(())
}

fn comparison_plot_csv(report: &survkit_core::metrics::ModelComparisonReport) -> String {
    let mut out = String::from("model,c_index\n");
    for e in &report.results {
        out.push_str(&format!("{},{}\n", e.model, e.result.c_index));
    }
    out
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    validate_models(&args.models)?;
    if !(args.split > 0.0 && args.split < 1.0) {
        return Err(CliError::validation("split fraction must be inside (0,1)"));
    }
    let ties = match args.tie_credit.as_str() {
        "half" => TieCredit::Half,
        "zero" => TieCredit::Zero,
        other => {
            return Err(CliError::validation(format!(
                "unknown tie credit `{other}` (half|zero)"
            )))
        }
    };
    let ds = load_input(&args.input)?;
    let (train, test) = train_test_split(&ds, args.split, args.seed).map_err(input_stage)?;
    let (train_s, test_s, scaling) = standardize(&train, &test).map_err(input_stage)?;

    let mut fitted: Vec<(String, Box<dyn RiskScorer>)> = Vec::new();
    for name in &args.models {
        let (_, scorer) = fit_by_name(name, &train_s, &scaling, args.seed)?;
        fitted.push((name.clone(), scorer));
    }
    let model_refs: Vec<(String, &dyn RiskScorer)> = fitted
        .iter()
        .map(|(n, s)| (n.clone(), s.as_ref()))
        .collect();
    let report = compare_models(
        &model_refs,
        &test_s,
        SplitMeta {
            seed: args.seed,
            fraction: args.split,
            n_train: train.n(),
            n_test: test.n(),
        },
        ties,
    )
    .map_err(run_stage)?;

    match args.format {
        Format::Json => emitln(&serde_json::to_string_pretty(&report).unwrap()),
        _ => emit(&render_comparison(&report)),
    }
    if let Some(path) = &args.out {
        write_output(path, &serde_json::to_string_pretty(&report).unwrap())?;
    }
    if let Some(path) = &args.plot {
        write_output(path, &comparison_plot_csv(&report))?;
    }
    Ok(())
}

fn cmd_weights(args: WeightsArgs) -> Result<(), CliError> {
    let artifact = ModelArtifact::load(&args.model).map_err(input_stage)?;
    let model = artifact.to_mtlr().map_err(input_stage)?;
    let csv = weight_matrix_csv(&weight_matrix(&model));
    match &args.out {
        Some(path) => write_output(path, &csv)?,
        None => emit(&csv),
    }
    Ok(())
}

fn cmd_regress(args: RegressArgs) -> Result<(), CliError> {
    let ds = load_input(&args.input)?;
    let regressors: Vec<String> = if args.regressors.is_empty() {
        DEFAULT_MVI_REGRESSORS.iter().map(|s| s.to_string()).collect()
    } else {
        args.regressors.clone()
    };
    let fit = fit_ols(&ds, &args.response, &regressors).map_err(run_stage)?;
    let text = render_ols(&fit);
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "schema_version": 1,
        "fit": fit,
    }))
    .unwrap();
    match args.format {
        Format::Json => emitln(&json),
        _ => emit(&text),
    }
    if let Some(prefix) = &args.out {
        write_output(&prefix.with_extension("txt"), &text)?;
        write_output(&prefix.with_extension("json"), &json)?;
    }
    Ok(())
}

fn cmd_synth(command: SynthCommand) -> Result<(), CliError> {
    let (ds, out) = match command {
        SynthCommand::Table1 { out } => (table1_replica(), out),
        SynthCommand::Weibull(args) => {
            let law = match args.law.as_str() {
                "normal" => CovariateLaw::StandardNormal,
                "uniform" => CovariateLaw::UniformSymmetric,
                other => {
                    return Err(CliError::validation(format!(
                        "unknown covariate law `{other}` (normal|uniform)"
                    )))
                }
            };
            let cfg = WeibullConfig {
                n: args.n,
                beta: parse_f64_list(&args.beta)?,
                shape: args.shape,
                scale: args.scale,
                censor_time: args.censor,
                covariate_law: law,
                seed: args.seed,
            };
            (generate_weibull(&cfg).map_err(input_stage)?, args.out)
        }
    };
    match out {
        Some(path) => {
            save_csv(&ds, &path)
                .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
            emitln(&format!("wrote {} rows to {}", ds.n(), path.display()));
        }
        None => emit(&survkit_core::data::write_csv(&ds)),
    }
    Ok(())
}

/// Flat `key = value` config file; `#` starts a comment. Recognized keys:
/// input, out, models, split, seed, format.
fn parse_config(path: &Path) -> Result<Vec<(String, String)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::validation(format!(
                "config line {}: expected key = value",
                i + 1
            )));
        };
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), CliError> {
    // merge config file under the flags
    let mut input = args.input;
    let mut out = args.out;
    let mut models = args.models;
    let mut split = args.split;
    let mut seed = args.seed;
    let mut format = args.format;
    if let Some(path) = &args.config {
        for (key, value) in parse_config(path)? {
            match key.as_str() {
                "input" => {
                    if input.is_none() {
                        input = Some(PathBuf::from(value));
                    }
                }
                "out" => {
                    if out.is_none() {
                        out = Some(PathBuf::from(value));
                    }
                }
                "models" => {
                    if models.is_empty() {
                        models = value.split(',').map(|m| m.trim().to_string()).collect();
                    }
                }
                "split" => {
                    if split.is_none() {
                        split = Some(value.parse().map_err(|_| {
                            CliError::validation(format!("config: bad split `{value}`"))
                        })?);
                    }
                }
                "seed" => {
                    if seed.is_none() {
                        seed = Some(value.parse().map_err(|_| {
                            CliError::validation(format!("config: bad seed `{value}`"))
                        })?);
                    }
                }
                "format" => {
                    if format.is_none() {
                        format = Some(match value.as_str() {
                            "text" => Format::Text,
                            "json" => Format::Json,
                            "csv" => Format::Csv,
                            other => {
                                return Err(CliError::validation(format!(
                                    "config: unknown format `{other}`"
                                )))
                            }
                        });
                    }
                }
                other => {
                    return Err(CliError::validation(format!(
                        "config: unknown key `{other}`"
                    )))
                }
            }
        }
    }
    let input = input.ok_or_else(|| CliError::validation("pipeline needs --input"))?;
    let out_dir = out.ok_or_else(|| CliError::validation("pipeline needs --out"))?;
    if models.is_empty() {
        models = KNOWN_MODELS.iter().map(|m| m.to_string()).collect();
    }
    let split = split.unwrap_or(0.7);
    let seed = seed.unwrap_or(0);
    validate_models(&models)?;
    if !(split > 0.0 && split < 1.0) {
        return Err(CliError::validation("split fraction must be inside (0,1)"));
    }

    let ds = load_input(&input)?;
    let (train, test) = train_test_split(&ds, split, seed).map_err(input_stage)?;
    let (train_s, test_s, scaling) = standardize(&train, &test).map_err(input_stage)?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", out_dir.display())))?;

    let mut fitted: Vec<(String, Box<dyn RiskScorer>)> = Vec::new();
    for name in &models {
        let (artifact, scorer) = fit_by_name(name, &train_s, &scaling, seed)?;
        artifact
            .save(out_dir.join(format!("{name}.json")))
            .map_err(run_stage)?;
        if name == "mtlr" {
            let matrix = weight_matrix(&artifact.to_mtlr().map_err(run_stage)?);
            write_output(&out_dir.join("weight_matrix.csv"), &weight_matrix_csv(&matrix))?;
        }
        fitted.push((name.clone(), scorer));
    }

    let model_refs: Vec<(String, &dyn RiskScorer)> = fitted
        .iter()
        .map(|(n, s)| (n.clone(), s.as_ref()))
        .collect();
    let report = compare_models(
        &model_refs,
        &test_s,
        SplitMeta {
            seed,
            fraction: split,
            n_train: train.n(),
            n_test: test.n(),
        },
        TieCredit::Half,
    )
    .map_err(run_stage)?;
    write_output(
        &out_dir.join("report.json"),
        &serde_json::to_string_pretty(&report).unwrap(),
    )?;
    write_output(&out_dir.join("comparison.csv"), &comparison_plot_csv(&report))?;

    // Kaplan-Meier on the training half, mirroring the summary-table protocol
    let curve = fit_km(&train).map_err(run_stage)?;
    let times: Vec<u32> = curve.steps.iter().map(|s| s.time).collect();
    let rows = summarize_at(&curve, &times, 0.95).map_err(run_stage)?;
    write_output(&out_dir.join("km_summary.csv"), &summary_csv(&rows))?;
    write_output(&out_dir.join("km_curve.csv"), &plot_points_csv(&curve, 0.95))?;

    if matches!(format, Some(Format::Text) | None) {
        emit(&render_comparison(&report));
    }
    emitln(&format!("artifacts written to {}", out_dir.display()));
    Ok(())
}
