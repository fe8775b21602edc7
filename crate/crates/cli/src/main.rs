//! `wfr`: fit, predict, generate, evaluate and plot from the command line.
//!
//! Exit codes: 0 on success, 1 for data or runtime errors, 2 for usage errors.

mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use wfr::datasets::{self, Family, GeneratorSpec};
use wfr::evaluation::{adjusted_rand_index, summarize};
use wfr::graph::{DEFAULT_OUTLIER_RATIO, DEFAULT_OUTLIER_STD};
use wfr::persist::{load_model, save_model};
use wfr::threshold::{DEFAULT_ALPHA, DEFAULT_F_MIN, DEFAULT_GRID_STEP, DEFAULT_MIN_CLUSTERS};
use wfr::{fit, GridSearch, KnnBackend, OutlierPolicy, ResemblanceKind, WfrParams, DEFAULT_EPS};

#[derive(Parser, Debug)]
#[command(name = "wfr", version, about = "Family resemblance clustering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster a point file and save the model.
    Fit(FitArgs),
    /// Label new points with a saved model.
    Predict(PredictArgs),
    /// Write a synthetic benchmark with a ground-truth label column.
    Gen(GenArgs),
    /// Compare predicted labels against ground truth.
    Eval(EvalArgs),
    /// Draw a labeled scatter plot as SVG.
    Plot(PlotArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OutlierMode {
    None,
    Ratio,
    Statistical,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("tau").required(true).args(["threshold", "auto_threshold"])))]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    /// log, cosine, rbf or sigmoid.
    #[arg(long, default_value = "log")]
    resemblance: ResemblanceKind,
    /// Kernel width for rbf and sigmoid; defaults to 1/d.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    coef0: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
    #[arg(long, default_value_t = wfr::neighbors::DEFAULT_K)]
    k: usize,
    /// Fixed threshold in [0, 1].
    #[arg(long, value_parser = parse_tau)]
    threshold: Option<f64>,
    /// Pick the threshold by grid search.
    #[arg(long)]
    auto_threshold: bool,
    #[arg(long, default_value_t = DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long, default_value_t = DEFAULT_F_MIN)]
    f_min: f64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Thresholds yielding fewer families are only chosen if nothing else qualifies.
    #[arg(long, default_value_t = DEFAULT_MIN_CLUSTERS)]
    min_clusters: usize,
    #[arg(long, value_enum, default_value_t = OutlierMode::Ratio)]
    outliers: OutlierMode,
    #[arg(long, default_value_t = DEFAULT_OUTLIER_RATIO)]
    outlier_ratio: f64,
    #[arg(long, default_value_t = DEFAULT_OUTLIER_STD)]
    outlier_std: f64,
    #[arg(long)]
    labels_out: PathBuf,
    #[arg(long)]
    model_out: PathBuf,
    #[arg(long)]
    diagnostics_out: Option<PathBuf>,
    /// brute or kdtree.
    #[arg(long, default_value = "kdtree")]
    knn_backend: KnnBackend,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// two_spirals, two_circles, two_moons or gaussian_blobs.
    #[arg(long)]
    family: Family,
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(2..))]
    n: u64,
    /// Coordinatewise noise; defaults to the family's own level.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    pred: PathBuf,
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_tau(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("threshold must be in [0, 1], got {v}"))
    }
}

fn run_fit(a: &FitArgs) -> Result<()> {
    let data = datasets::read_points_csv(&a.input)?;
    let mut params = WfrParams::new(a.resemblance, data.d())
        .with_k(a.k)
        .with_backend(a.knn_backend)
        .with_outliers(match a.outliers {
            OutlierMode::None => OutlierPolicy::None,
            OutlierMode::Ratio => OutlierPolicy::ratio(a.outlier_ratio)?,
            OutlierMode::Statistical => OutlierPolicy::statistical(a.outlier_std)?,
        });
    if let Some(g) = a.gamma {
        params.resemblance.gamma = g;
    }
    params.resemblance.coef0 = a.coef0;
    params.resemblance.eps = a.eps;
    params = match a.threshold {
        Some(tau) => params.with_threshold(tau),
        None => params.with_auto_threshold(GridSearch {
            step: a.grid_step,
            f_min: a.f_min,
            alpha: a.alpha,
            eps: a.eps,
            min_clusters: a.min_clusters,
        }),
    };
    let result = fit(&data, &params)?;
    datasets::write_labels_csv(&a.labels_out, result.labels())?;
    save_model(&a.model_out, &result.model)?;
    if let Some(path) = &a.diagnostics_out {
        match &result.diagnostics {
            Some(diag) => diag.save_csv(path)?,
            None => bail!("--diagnostics-out needs --auto-threshold"),
        }
    }
    println!("tau={} {}", result.tau(), summarize(result.labels()));
    Ok(())
}

fn run_predict(a: &PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let table = datasets::read_table(&a.input)?;
    let labels = model.predict_rows(&table.row_slices())?;
    datasets::write_labels_csv(&a.output, &labels)?;
    println!("{}", summarize(&labels));
    Ok(())
}

fn run_gen(a: &GenArgs) -> Result<()> {
    let mut spec = GeneratorSpec::new(a.family, a.n as usize, a.seed);
    if let Some(noise) = a.noise {
        spec = spec.with_noise(noise);
    }
    let (data, truth) = datasets::generate(&spec)?;
    datasets::write_points_csv(&a.out, &data, Some(&truth))?;
    Ok(())
}

fn run_eval(a: &EvalArgs) -> Result<()> {
    let pred = datasets::read_labels_csv(&a.pred)?;
    let truth = datasets::read_labels_csv(&a.truth)?;
    let ari = adjusted_rand_index(pred.as_slice(), truth.as_slice())?;
    println!("ari={ari}");
    println!("pred: {}", summarize(&pred));
    println!("truth: {}", summarize(&truth));
    Ok(())
}

fn run_plot(a: &PlotArgs) -> Result<()> {
    let data = datasets::read_points_csv(&a.input)?;
    let labels = datasets::read_labels_csv(&a.labels)?;
    if labels.len() != data.n() {
        bail!(
            "{} has {} labels but {} has {} points",
            a.labels.display(),
            labels.len(),
            a.input.display(),
            data.n()
        );
    }
    write_file(&a.out, &svg::scatter(&data, &labels))
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).with_context(|| format!("writing {}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Fit(a) => run_fit(a),
        Command::Predict(a) => run_predict(a),
        Command::Gen(a) => run_gen(a),
        Command::Eval(a) => run_eval(a),
        Command::Plot(a) => run_plot(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
