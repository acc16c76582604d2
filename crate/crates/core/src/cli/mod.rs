//! The `vqkm` command-line harness: generate, train, cluster, plot.

mod artifacts;
mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub use artifacts::{
    read_trace, trace_csv, write_atomic, ClusterReport, ModelFile, TraceRow, SCHEMA_VERSION,
};
pub use config::{DatasetSpec, ExperimentConfig, Generator, Preset, BLOB_CENTERS};

use crate::clustering::{matched_accuracy, qmeans_run, CentroidMode, ClusterConfig, ClusterModel};
use crate::datasets::{load_csv, write_csv, Dataset};
use crate::error::{Error, Result};
use crate::feature_map::{embed_all, MapKind};
use crate::quantum::EstimationMode;
use crate::training::{
    cost_state_overlap, evaluate_cost, overlap_matrix, train, CostVariant, GradMethod, LabelMode,
    TrainingTrace,
};
use svg::Series;

#[derive(Debug, Parser)]
#[command(name = "vqkm", version, about = "Variational quantum kernel k-means")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset to CSV.
    Generate(GenerateArgs),
    /// Train the feature map; writes trace.csv and model.json.
    Train(TrainArgs),
    /// Cluster a dataset under a trained feature map.
    Cluster(ClusterArgs),
    /// Render traces and/or a labelled dataset as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct DataArgs {
    /// Read points (and optional labels) from a CSV file.
    #[arg(long, conflicts_with = "kind")]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<Generator>,
    /// Points per cluster.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of clusters (blob count for the blobs generator).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub stddev: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    /// Skip standardization and scaling into [−π/2, π/2].
    #[arg(long)]
    pub raw: bool,
}

impl DataArgs {
    fn is_set(&self) -> bool {
        self.data.is_some() || self.kind.is_some()
    }

    fn apply(&self, spec: &mut DatasetSpec) {
        if let Some(path) = &self.data {
            *spec = DatasetSpec {
                preprocess: spec.preprocess,
                ..DatasetSpec::from_csv(path)
            };
        }
        if let Some(kind) = self.kind {
            *spec = DatasetSpec {
                preprocess: spec.preprocess,
                ..DatasetSpec::for_generator(kind)
            };
        }
        if let Some(n) = self.n {
            spec.n_per_cluster = n;
        }
        if let Some(k) = self.k {
            spec.set_k(k);
        }
        if let Some(noise) = self.noise {
            spec.noise = noise;
        }
        if let Some(stddev) = self.stddev {
            spec.stddev = stddev;
        }
        if let Some(radii) = &self.radii {
            spec.radii = radii.clone();
        }
        if self.raw {
            spec.preprocess = false;
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GradChoice {
    FiniteDifference,
    ParameterShift,
}

#[derive(Debug, Clone, Default, Args)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub map: Option<MapKind>,
    #[arg(long)]
    pub qubits: Option<usize>,
    #[arg(long)]
    pub layers: Option<usize>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ClusterFlags {
    /// exact, shots:N or ae:P
    #[arg(long)]
    pub estimation: Option<EstimationMode>,
    #[arg(long, value_enum)]
    pub centroids: Option<CentroidMode>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub eps3: Option<f64>,
}

impl ClusterFlags {
    fn apply(&self, c: &mut ClusterConfig) {
        if let Some(e) = self.estimation {
            c.estimation = e;
        }
        if let Some(m) = self.centroids {
            c.centroid_mode = m;
        }
        if let Some(r) = self.restarts {
            c.restarts = r;
        }
        if let Some(m) = self.max_iterations {
            c.max_iterations = m;
        }
        if let Some(e) = self.eps3 {
            c.eps3 = e;
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// JSON experiment config; flags override its values.
    #[arg(long, conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub cluster: ClusterFlags,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub step_size: Option<f64>,
    /// Comma-separated step sizes trained in parallel.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub sweep: Option<Vec<f64>>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub eps4: Option<f64>,
    #[arg(long, value_enum)]
    pub cost: Option<CostVariant>,
    #[arg(long, value_enum)]
    pub label_mode: Option<LabelMode>,
    #[arg(long, value_enum)]
    pub grad: Option<GradChoice>,
    #[arg(long)]
    pub fd_step: Option<f64>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// Also write cost-vs-epoch SVG.
    #[arg(long)]
    pub plot: bool,
    /// Record wall-clock milliseconds in trace.csv.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ClusterArgs {
    /// model.json written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub map: MapArgs,
    #[command(flatten)]
    pub cluster: ClusterFlags,
    /// Seed for regenerating the dataset and for k-means++; defaults to the model's.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Also write a scatter SVG of the assigned labels.
    #[arg(long)]
    pub plot: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// Trace CSV files; one line each.
    #[arg(long, num_args = 1..)]
    pub trace: Vec<PathBuf>,
    /// Dataset CSV to scatter.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for I/O and data problems, 2 for usage and configuration problems.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Parse(_) | Error::Numerical { .. } | Error::EmptyCluster(_) => 1,
        Error::Capacity(_)
        | Error::Index { .. }
        | Error::Shape(_)
        | Error::Argument(_)
        | Error::Unsupported(_) => 2,
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Generate(a) => cmd_generate(a).map(|_| ()),
        Command::Train(a) => cmd_train(a).map(|_| ()),
        Command::Cluster(a) => cmd_cluster(a).map(|_| ()),
        Command::Plot(a) => cmd_plot(a),
    }
}

fn summarize(ds: &Dataset) -> String {
    let bounds: Vec<String> = ds
        .bounds()
        .iter()
        .map(|(lo, hi)| format!("[{lo:.4}, {hi:.4}]"))
        .collect();
    format!(
        "{}: N = {}, k = {}, bounds {}",
        ds.name,
        ds.len(),
        ds.n_classes().map_or("-".into(), |k| k.to_string()),
        bounds.join(" × ")
    )
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<Dataset> {
    if !args.data.is_set() {
        return Err(Error::Argument("generate needs --kind or --data".into()));
    }
    let mut spec = DatasetSpec::default();
    args.data.apply(&mut spec);
    let ds = spec.build(args.seed)?;
    let mut bytes = Vec::new();
    write_csv(&ds, &mut bytes)?;
    write_atomic(&args.out, &bytes)?;
    println!("{}", summarize(&ds));
    Ok(ds)
}

/// Resolves defaults, preset, config file and flags into one config.
pub fn resolve_train_config(args: &TrainArgs) -> Result<ExperimentConfig> {
    let mut c = match (&args.config, args.preset) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Some(p)) => ExperimentConfig::preset(p),
        (None, None) => ExperimentConfig::default(),
    };
    args.data.apply(&mut c.dataset);
    if let Some(k) = args.data.k {
        c.cluster.k = k;
    } else if let Some(classes) = c.dataset.classes() {
        c.cluster.k = classes;
    }
    if let Some(m) = args.map.map {
        c.feature_map.kind = m;
    }
    if let Some(q) = args.map.qubits {
        c.feature_map.n_qubits = q;
    }
    if let Some(l) = args.map.layers {
        c.feature_map.n_layers = l;
    }
    args.cluster.apply(&mut c.cluster);
    if let Some(s) = args.seed {
        c.seed = s;
    }
    if let Some(out) = &args.out {
        c.out = out.clone();
    }
    let t = &mut c.train;
    if let Some(s) = args.step_size {
        t.step_size = s;
    }
    if let Some(e) = args.epochs {
        t.max_epochs = e;
    }
    if let Some(e) = args.eps4 {
        t.eps4 = e;
    }
    if let Some(v) = args.cost {
        t.cost = v;
    }
    if let Some(m) = args.label_mode {
        t.label_mode = m;
    }
    if let Some(s) = args.init_scale {
        t.init_scale = s;
    }
    match args.grad {
        Some(GradChoice::ParameterShift) => t.grad_method = GradMethod::ParameterShift,
        Some(GradChoice::FiniteDifference) => {
            t.grad_method = GradMethod::FiniteDifference {
                step: args.fd_step.unwrap_or(1e-3),
            }
        }
        None => {
            if let (Some(step), GradMethod::FiniteDifference { .. }) = (args.fd_step, t.grad_method)
            {
                t.grad_method = GradMethod::FiniteDifference { step };
            }
        }
    }
    if let Some(sweep) = &args.sweep {
        c.sweep = if sweep.is_empty() { vec![0.05, 0.1, 0.15] } else { sweep.clone() };
    }
    c.timing |= args.timing;
    let c = c.synced();
    c.validate()?;
    Ok(c)
}

fn step_tag(step: f64) -> String {
    format!("step{step}")
}

/// Result of one `train` invocation: one entry per step size.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub config: ExperimentConfig,
    pub runs: Vec<(f64, TrainingTrace)>,
}

pub fn cmd_train(args: &TrainArgs) -> Result<TrainOutcome> {
    let config = resolve_train_config(args)?;
    let outcome = run_training(&config)?;
    if args.plot || outcome.runs.len() > 1 {
        write_cost_plot(&outcome)?;
    }
    Ok(outcome)
}

/// Trains per `config` and writes trace and model files into `config.out`.
pub fn run_training(config: &ExperimentConfig) -> Result<TrainOutcome> {
    let ds = config.dataset.build(config.seed)?;
    if ds.dim() != config.feature_map.feature_dim {
        return Err(Error::Shape(format!(
            "dataset has {} features, feature map expects {}",
            ds.dim(),
            config.feature_map.feature_dim
        )));
    }
    let steps = if config.sweep.is_empty() { vec![config.train.step_size] } else { config.sweep.clone() };
    let runs: Vec<(f64, TrainingTrace)> = steps
        .par_iter()
        .map(|&step| {
            let mut tc = config.train;
            tc.step_size = step;
            train(&ds.points, ds.labels.as_deref(), &config.feature_map, &config.cluster, &tc)
                .map(|trace| (step, trace))
        })
        .collect::<Result<_>>()?;
    let sweep = runs.len() > 1;
    for (step, trace) in &runs {
        let suffix = if sweep { format!("_{}", step_tag(*step)) } else { String::new() };
        let rows = artifacts::trace_rows(trace, config.timing);
        write_atomic(&config.out.join(format!("trace{suffix}.csv")), &trace_csv(&rows)?)?;
        let model = ModelFile::new(config, *step, trace, ds.preprocessing.clone());
        artifacts::write_json(&config.out.join(format!("model{suffix}.json")), &model)?;
        println!(
            "step {step}: min C = {:.6} at epoch {} ({} epochs, converged: {})",
            trace.min_cost,
            trace.argmin_epoch,
            model.epochs_run,
            trace.converged
        );
    }
    Ok(TrainOutcome { config: config.clone(), runs })
}

fn write_cost_plot(outcome: &TrainOutcome) -> Result<()> {
    let series: Vec<Series> = outcome
        .runs
        .iter()
        .map(|(step, trace)| Series {
            name: format!("step {step}"),
            points: trace.records.iter().map(|r| (r.epoch as f64, r.cost)).collect(),
        })
        .collect();
    let name = if series.len() > 1 { "cost_sweep.svg" } else { "cost.svg" };
    let chart = svg::line_chart(
        &format!("{} cost vs epoch", outcome.config.dataset.generator_name()),
        "epoch",
        "C(θ)",
        &series,
    );
    write_atomic(&outcome.config.out.join(name), chart.as_bytes())
}

impl DatasetSpec {
    fn generator_name(&self) -> String {
        match &self.path {
            Some(p) => p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            None => format!("{:?}", self.generator).to_lowercase(),
        }
    }
}

/// Output of `cluster`.
#[derive(Debug, Clone)]
pub struct ClusterOutcome {
    pub dataset: Dataset,
    pub model: ClusterModel,
    pub report: ClusterReport,
}

pub fn cmd_cluster(args: &ClusterArgs) -> Result<ClusterOutcome> {
    let trained = ModelFile::load(&args.model)?;
    let spec = trained.feature_map;
    let mismatch = |what: &str, flag: Option<String>, model: String| match flag {
        Some(f) if f != model => Err(Error::Argument(format!(
            "{what} {f} does not match the model's {model}"
        ))),
        _ => Ok(()),
    };
    mismatch("map", args.map.map.map(|m| format!("{m:?}")), format!("{:?}", spec.kind))?;
    mismatch("qubits", args.map.qubits.map(|q| q.to_string()), spec.n_qubits.to_string())?;
    mismatch("layers", args.map.layers.map(|l| l.to_string()), spec.n_layers.to_string())?;

    let mut config = trained.config.clone();
    if let Some(s) = args.seed {
        config.seed = s;
    }
    args.data.apply(&mut config.dataset);
    if let Some(k) = args.data.k {
        config.cluster.k = k;
    } else if args.data.is_set() {
        if let Some(classes) = config.dataset.classes() {
            config.cluster.k = classes;
        }
    }
    args.cluster.apply(&mut config.cluster);
    config.out = args.out.clone();
    let config = config.synced();
    config.cluster.validate()?;

    let ds = config.dataset.build(config.seed)?;
    if ds.dim() != spec.feature_dim {
        return Err(Error::Argument(format!(
            "dataset has {} features, model expects {}",
            ds.dim(),
            spec.feature_dim
        )));
    }
    let theta = &trained.best_theta;
    let model = qmeans_run(&ds.points, theta, &spec, &config.cluster)?;
    let k = config.cluster.k;

    let overlaps = overlap_matrix(&model.characteristic_states)?;
    let states = embed_all(&ds.points, theta, &spec)?;
    let final_cost = match trained.cost {
        CostVariant::StateOverlap => Some(cost_state_overlap(&overlaps)),
        variant => evaluate_cost(variant, &states, &model.labels, k).ok(),
    };
    let mut sizes = vec![0; k];
    model.labels.iter().for_each(|&l| sizes[l] += 1);
    let accuracy = match &ds.labels {
        Some(truth) if truth.iter().all(|&l| l < k) && k <= 8 => {
            Some(matched_accuracy(&model.labels, truth, k)?)
        }
        _ => None,
    };
    let report = ClusterReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        cluster: config.cluster,
        cost: trained.cost,
        final_cost,
        overlap_matrix: overlaps,
        iterations: model.iterations_run,
        converged: model.converged,
        restart: model.restart,
        scatter: model.scatter,
        cluster_sizes: sizes,
        repairs: model.repairs.clone(),
        accuracy,
    };

    let labelled = Dataset {
        labels: Some(model.labels.clone()),
        ..ds.clone()
    };
    let mut bytes = Vec::new();
    write_csv(&labelled, &mut bytes)?;
    write_atomic(&args.out.join("labels.csv"), &bytes)?;
    artifacts::write_json(&args.out.join("report.json"), &report)?;
    if args.plot {
        let chart = svg::scatter("clusters", &labelled.points, labelled.labels.as_deref());
        write_atomic(&args.out.join("clusters.svg"), chart.as_bytes())?;
    }
    println!(
        "{} points, {} iterations (converged: {}), sizes {:?}{}",
        ds.len(),
        model.iterations_run,
        model.converged,
        report.cluster_sizes,
        accuracy.map_or(String::new(), |a| format!(", accuracy {a:.4}"))
    );
    Ok(ClusterOutcome { dataset: ds, model, report })
}

pub fn cmd_plot(args: &PlotArgs) -> Result<()> {
    if args.trace.is_empty() && args.data.is_none() {
        return Err(Error::Argument("plot needs --trace and/or --data".into()));
    }
    if !args.trace.is_empty() {
        let series = args
            .trace
            .iter()
            .map(|path| {
                let rows = read_trace(path)?;
                Ok(Series {
                    name: stem(path),
                    points: rows.iter().map(|r| (r.epoch as f64, r.cost)).collect(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let title = args.title.clone().unwrap_or_else(|| "C(θ) vs epoch".into());
        let chart = svg::line_chart(&title, "epoch", "C(θ)", &series);
        write_atomic(&args.out.join("cost.svg"), chart.as_bytes())?;
    }
    if let Some(path) = &args.data {
        let ds = load_csv(path)?;
        if ds.dim() != 2 {
            return Err(Error::Parse(format!("{}: scatter needs 2 features", path.display())));
        }
        let title = args.title.clone().unwrap_or_else(|| stem(path));
        let chart = svg::scatter(&title, &ds.points, ds.labels.as_deref());
        write_atomic(&args.out.join("scatter.svg"), chart.as_bytes())?;
    }
    Ok(())
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}
