//! Command-line front-end: training, prediction, cross-validation, bound
//! and prior calculators, and the resampling experiments. Exits with 0 on
//! success, 2 on configuration errors, and 3 on data errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use pnu::data::{load_csv, scale_features, synth_gaussians, ClassPrior, SampleSet, TripleDataset};
use pnu::error::{Error, Result};
use pnu::experiment::{
    run_benchmark_compare, run_validation_ratio, run_variance_ratio, DataSource, ExperimentConfig,
    ExperimentReport,
};
use pnu::loss::Loss;
use pnu::model::{median_bandwidths, Basis, CenterSelection, Classifier};
use pnu::prior::estimate_prior;
use pnu::risk::{build_base, build_combined, build_pnu, PnuMode, RiskFamily};
use pnu::selection::{cross_validate, CvConfig, Grid, ValidationScore};
use pnu::solver::{train, TrainConfig, TrainMethod};
use pnu::theory::{generalization_bound, BoundInputs};
use pnu::ScalingRecord;

#[derive(Parser)]
#[command(name = "pnu", version, about = "Semi-supervised classification from P/N/U data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a classifier on a dataset and write it as JSON.
    Train(TrainArgs),
    /// Predict labels for a CSV with a saved model.
    Predict(PredictArgs),
    /// Grid search by k-fold cross-validation.
    Cv(CvArgs),
    /// Generalization-bound calculator for a trained model.
    Bound(BoundArgs),
    /// Estimate the unlabeled class prior by energy-distance minimization.
    EstimatePrior(EstimatePriorArgs),
    /// Variance-ratio experiment (PNU vs PN risk variance).
    ExpVariance(ExperimentArgs),
    /// Validation-score experiment (PNU- vs PN-selected test error).
    ExpValidation(ExperimentArgs),
    /// Benchmark-style comparison of PNU, PUNU, and PN training.
    ExpBenchmark(ExperimentArgs),
}

#[derive(Args)]
struct DataArgs {
    /// CSV dataset (header row; label column with +1/-1/0).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Label column name.
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Synthetic dataset instead of a CSV, as
    /// `theta=0.5,n_p=50,n_n=50,n_u=300,sep=2,dim=2,seed=1`.
    #[arg(long)]
    synthetic: Option<String>,
    /// Class prior of the unlabeled marginal: a number or `estimate`.
    #[arg(long)]
    prior: Option<String>,
    /// Rescale every feature to [0, 1] before training.
    #[arg(long)]
    scale: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Risk family: PN, N-PU, C-PU, N-NU, C-NU, N-PUNU, C-PUNU, N-PNPU,
    /// C-PNPU, N-PNNU, C-PNNU, or PNU.
    #[arg(long, default_value = "PNU")]
    family: String,
    #[arg(long, default_value = "scaled_squared")]
    loss: String,
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    /// PNU trade-off in [-1, 1].
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    /// Combination weight in [0, 1] for the combined families.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Model: `gaussian` or `linear`.
    #[arg(long, default_value = "gaussian")]
    model: String,
    /// Gaussian bandwidth as a multiple of the median pairwise distance.
    #[arg(long, default_value_t = 1.0)]
    bandwidth_multiplier: f64,
    /// Kernel centers: `labeled`, `all`, or `subsample:N`.
    #[arg(long, default_value = "subsample:500")]
    centers: String,
    /// Print the CCCP objective trace as CSV on stderr.
    #[arg(long)]
    trace: bool,
    /// Output path for the model JSON (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Saved model JSON.
    #[arg(long)]
    model: PathBuf,
    /// CSV of points to predict; a label column is ignored when present.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "PNU")]
    family: String,
    #[arg(long, default_value = "scaled_squared")]
    loss: String,
    /// Number of folds.
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON file overriding the default grid.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// Validation score: `pnu`, `punu`, or `pn`.
    #[arg(long, default_value = "pnu")]
    score: String,
    #[arg(long, default_value = "subsample:500")]
    centers: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Saved model JSON to read norm caps from.
    #[arg(long)]
    model: PathBuf,
    /// A combined family: N-PUNU, N-PNPU, N-PNNU, C-PUNU, C-PNPU, C-PNNU.
    #[arg(long, default_value = "N-PNPU")]
    family: String,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimatePriorArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "label")]
    label_column: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Labeled CSV pool for trial draws (synthetic Gaussians if omitted).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, default_value = "label")]
    label_column: String,
    /// Synthetic generator override, as `sep=2,dim=2`.
    #[arg(long)]
    synthetic: Option<String>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Class prior of unlabeled/validation/test draws.
    #[arg(long, default_value_t = 0.5)]
    theta_u: f64,
    /// Class ratio of the labeled training draw.
    #[arg(long, default_value_t = 0.5)]
    theta_l: f64,
    #[arg(long, default_value_t = 20)]
    n_labeled: usize,
    /// Unlabeled training size (benchmark).
    #[arg(long, default_value_t = 300)]
    n_unlabeled: usize,
    /// Unlabeled validation sweep, comma separated.
    #[arg(long, default_value = "10,50,100,300", value_delimiter = ',')]
    n_u_val: Vec<usize>,
    #[arg(long, default_value_t = 400)]
    resamples: usize,
    #[arg(long, default_value_t = 10000)]
    n_test: usize,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// JSON file overriding the desk-scale grid.
    #[arg(long)]
    grid: Option<PathBuf>,
    /// JSON report path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Plot-ready long-format CSV path (setting,trial,value).
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// On-disk model: the classifier plus the scaling record when training
/// rescaled features.
#[derive(Serialize, Deserialize)]
struct TrainedModel {
    #[serde(flatten)]
    classifier: Classifier,
    #[serde(skip_serializing_if = "Option::is_none")]
    scaler: Option<ScalingRecord>,
}

fn parse_kv(spec: &str) -> Result<std::collections::HashMap<String, f64>> {
    let mut out = std::collections::HashMap::new();
    for part in spec.split(',') {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::config(format!("expected key=value, got '{part}'")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::config(format!("non-numeric value in '{part}'")))?;
        out.insert(key.trim().to_string(), value);
    }
    Ok(out)
}

fn parse_loss(name: &str) -> Result<Loss> {
    Loss::parse(name).ok_or_else(|| Error::config(format!("unknown loss '{name}'")))
}

fn parse_family(name: &str) -> Result<RiskFamily> {
    RiskFamily::parse(name).ok_or_else(|| Error::config(format!("unknown family '{name}'")))
}

fn parse_centers(spec: &str) -> Result<CenterSelection> {
    match spec {
        "labeled" => Ok(CenterSelection::LabeledOnly),
        "all" => Ok(CenterSelection::AllPoints),
        other => {
            if let Some(n) = other.strip_prefix("subsample:") {
                let cap = n
                    .parse()
                    .map_err(|_| Error::config(format!("bad subsample cap '{n}'")))?;
                Ok(CenterSelection::Subsample { cap, seed: 0 })
            } else {
                Err(Error::config(format!(
                    "centers must be labeled, all, or subsample:N; got '{other}'"
                )))
            }
        }
    }
}

fn load_dataset(args: &DataArgs) -> Result<(TripleDataset, Option<ScalingRecord>)> {
    let mut dataset = match (&args.data, &args.synthetic) {
        (Some(path), None) => load_csv(path, &args.label_column)?,
        (None, Some(spec)) => {
            let kv = parse_kv(spec)?;
            let get = |key: &str, default: f64| kv.get(key).copied().unwrap_or(default);
            synth_gaussians(
                get("theta", 0.5),
                get("n_p", 50.0) as usize,
                get("n_n", 50.0) as usize,
                get("n_u", 300.0) as usize,
                get("sep", 2.0),
                get("dim", 2.0) as usize,
                get("seed", 1.0) as u64,
            )?
        }
        _ => {
            return Err(Error::config(
                "supply exactly one of --data or --synthetic",
            ))
        }
    };
    match args.prior.as_deref() {
        Some("estimate") => {
            let estimate = estimate_prior(
                &dataset.positives,
                &dataset.negatives,
                &dataset.unlabeled,
            )?;
            eprintln!(
                "estimated prior: {:.4}{}",
                estimate.theta_hat,
                if estimate.degenerate { " (degenerate)" } else { "" }
            );
            dataset.prior = Some(ClassPrior::new(estimate.theta_hat.clamp(0.01, 0.99))?);
        }
        Some(value) => {
            let theta: f64 = value
                .parse()
                .map_err(|_| Error::config(format!("bad prior '{value}'")))?;
            dataset.prior = Some(ClassPrior::new(theta)?);
        }
        None => {}
    }
    let scaler = if args.scale {
        let (scaled, record) = scale_features(&dataset)?;
        dataset = scaled;
        Some(record)
    } else {
        None
    };
    Ok((dataset, scaler))
}

fn build_basis(
    model: &str,
    data: &TripleDataset,
    centers: &str,
    bandwidth_multiplier: f64,
) -> Result<Basis> {
    match model {
        "linear" => Ok(Basis::raw_linear(data.dim())),
        "gaussian" => {
            let selection = parse_centers(centers)?;
            let all = SampleSet::new(data.all_points(), data.dim())?;
            let bandwidth = median_bandwidths(&all, &[bandwidth_multiplier])?[0];
            Basis::gaussian(selection.centers(data), bandwidth)
        }
        other => Err(Error::config(format!(
            "model must be gaussian or linear, got '{other}'"
        ))),
    }
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn load_grid(path: &Option<PathBuf>, default: Grid) -> Result<Grid> {
    match path {
        None => Ok(default),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::data(format!("cannot read {}: {e}", path.display())))?;
            let grid: Grid = serde_json::from_str(&text)
                .map_err(|e| Error::config(format!("bad grid file: {e}")))?;
            grid.validate()?;
            Ok(grid)
        }
    }
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let (dataset, scaler) = load_dataset(&args.data)?;
    let prior = dataset.require_prior()?;
    let family = parse_family(&args.family)?;
    let loss = parse_loss(&args.loss)?;
    let spec = match family {
        RiskFamily::Pnu => build_pnu(args.eta, prior, loss, PnuMode::Convex)
            .or_else(|_| build_pnu(args.eta, prior, loss, PnuMode::NonConvex))?,
        f if RiskFamily::COMBINED.contains(&f) => build_combined(f, args.gamma, prior, loss)?,
        f => build_base(f, prior, loss)?,
    };
    let basis = build_basis(&args.model, &dataset, &args.centers, args.bandwidth_multiplier)?;
    let mut config = TrainConfig::new(args.lambda);
    config.method = TrainMethod::Auto;
    let outcome = train(&spec, &dataset, &basis, &config)?;
    if args.trace {
        if let Some(trace) = &outcome.trace {
            eprintln!("iter,objective");
            for (i, obj) in trace.iter().enumerate() {
                eprintln!("{i},{obj}");
            }
        }
    }
    let model = TrainedModel {
        classifier: outcome.classifier,
        scaler,
    };
    write_output(&args.out, &serde_json::to_string_pretty(&model).unwrap())
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", args.model.display())))?;
    let model: TrainedModel = serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("bad model file: {e}")))?;
    let points = load_feature_rows(&args.data, &args.label_column)?;
    let mut rows = String::from("prediction,decision\n");
    for x in &points {
        let point = match &model.scaler {
            Some(scaler) => scaler.apply(x),
            None => x.clone(),
        };
        if point.len() != model.classifier.basis.dim() {
            return Err(Error::data(format!(
                "point dimension {} does not match model dimension {}",
                point.len(),
                model.classifier.basis.dim()
            )));
        }
        let decision = model.classifier.decision(&point);
        let label = if decision >= 0.0 { 1 } else { -1 };
        rows.push_str(&format!("{label},{decision}\n"));
    }
    write_output(&args.out, rows.trim_end())
}

/// Reads feature rows in file order, dropping the label column when the
/// header has one.
fn load_feature_rows(path: &PathBuf, label_column: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::data(format!("cannot open {}: {e}", path.display())))?;
    let label_idx = reader
        .headers()
        .map_err(|e| Error::data(format!("cannot read header: {e}")))?
        .iter()
        .position(|h| h == label_column);
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            row: i + 1,
            message: e.to_string(),
        })?;
        let mut point = Vec::with_capacity(record.len());
        for (col, cell) in record.iter().enumerate() {
            if Some(col) == label_idx {
                continue;
            }
            point.push(cell.trim().parse::<f64>().map_err(|_| Error::Parse {
                row: i + 1,
                message: format!("malformed numeric cell '{cell}' in column {col}"),
            })?);
        }
        points.push(point);
    }
    Ok(points)
}

fn cmd_cv(args: &CvArgs) -> Result<()> {
    let (dataset, _) = load_dataset(&args.data)?;
    let grid = load_grid(&args.grid, Grid::default())?;
    let score = match args.score.as_str() {
        "pnu" => ValidationScore::PnuAtEtaBar,
        "punu" => ValidationScore::PunuAtGammaBar,
        "pn" => ValidationScore::PnZeroOne,
        other => return Err(Error::config(format!("unknown score '{other}'"))),
    };
    let config = CvConfig {
        family: parse_family(&args.family)?,
        loss: parse_loss(&args.loss)?,
        k: args.k,
        seed: args.seed,
        score,
        centers: parse_centers(&args.centers)?,
        raw_linear_basis: false,
        pnu_mode: PnuMode::Convex,
    };
    let report = cross_validate(&dataset, &grid, &config)?;
    write_output(&args.out, &serde_json::to_string_pretty(&report).unwrap())
}

fn cmd_bound(args: &BoundArgs) -> Result<()> {
    let (dataset, _) = load_dataset(&args.data)?;
    let prior = dataset.require_prior()?;
    let family = parse_family(&args.family)?;
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| Error::data(format!("cannot read {}: {e}", args.model.display())))?;
    let model: TrainedModel = serde_json::from_str(&text)
        .map_err(|e| Error::config(format!("bad model file: {e}")))?;

    // the empirical risk enters with the family's own loss: ramp for the
    // non-convex bounds, truncated squared for the convex ones
    let loss = if family.is_convex_family() {
        Loss::TruncatedSquared
    } else {
        Loss::Ramp
    };
    let spec = build_combined(family, args.gamma, prior, loss)?;
    let empirical = spec.evaluate_empirical(&dataset, &model.classifier)?;
    let inputs = BoundInputs::from_trained(
        &model.classifier,
        &dataset.all_points(),
        args.delta,
        dataset.positives.len(),
        dataset.negatives.len(),
        dataset.unlabeled.len(),
        prior,
    )?;
    let bound = generalization_bound(family, args.gamma, empirical, &inputs)?;
    let record = serde_json::json!({
        "family": family.name(),
        "gamma": args.gamma,
        "loss": loss.name(),
        "empirical_risk": empirical,
        "inputs": inputs,
        "bound": bound,
    });
    write_output(&args.out, &serde_json::to_string_pretty(&record).unwrap())
}

fn cmd_estimate_prior(args: &EstimatePriorArgs) -> Result<()> {
    let dataset = load_csv(&args.data, &args.label_column)?;
    let estimate = estimate_prior(&dataset.positives, &dataset.negatives, &dataset.unlabeled)?;
    println!("{}", serde_json::to_string_pretty(&estimate).unwrap());
    Ok(())
}

fn experiment_config(args: &ExperimentArgs) -> Result<ExperimentConfig> {
    let source = match (&args.data, &args.synthetic) {
        (Some(path), None) => DataSource::Csv {
            path: path.display().to_string(),
            label_column: args.label_column.clone(),
        },
        (None, spec) => {
            let kv = spec.as_deref().map(parse_kv).transpose()?.unwrap_or_default();
            DataSource::Synthetic {
                separation: kv.get("sep").copied().unwrap_or(2.0),
                dim: kv.get("dim").copied().unwrap_or(2.0) as usize,
            }
        }
        _ => return Err(Error::config("supply at most one of --data or --synthetic")),
    };
    let mut config = ExperimentConfig::desk(args.theta_u);
    config.source = source;
    config.trials = args.trials;
    config.seed = args.seed;
    config.n_labeled = args.n_labeled;
    config.theta_labeled = args.theta_l;
    config.n_unlabeled = args.n_unlabeled;
    config.n_u_val_sweep = args.n_u_val.clone();
    config.resamples = args.resamples;
    config.n_test = args.n_test;
    config.k = args.k;
    config.grid = load_grid(&args.grid, Grid::desk())?;
    Ok(config)
}

fn write_report(report: &ExperimentReport, args: &ExperimentArgs) -> Result<()> {
    if let Some(path) = &args.csv {
        std::fs::write(path, report.to_long_csv())
            .map_err(|e| Error::data(format!("cannot write {}: {e}", path.display())))?;
    }
    write_output(&args.out, &serde_json::to_string_pretty(report).unwrap())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Cv(args) => cmd_cv(args),
        Command::Bound(args) => cmd_bound(args),
        Command::EstimatePrior(args) => cmd_estimate_prior(args),
        Command::ExpVariance(args) => {
            write_report(&run_variance_ratio(&experiment_config(args)?)?, args)
        }
        Command::ExpValidation(args) => {
            write_report(&run_validation_ratio(&experiment_config(args)?)?, args)
        }
        Command::ExpBenchmark(args) => {
            write_report(&run_benchmark_compare(&experiment_config(args)?)?, args)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
