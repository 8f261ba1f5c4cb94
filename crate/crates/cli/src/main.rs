//! `ehyclus` — simulate benchmark datasets, run the index-based clustering
//! pipeline, and reproduce the benchmark tables from the command line.
//!
//! Exit codes: 0 success, 1 configuration error (bad flags, unknown names,
//! invalid combinations), 2 runtime error (I/O, numerical failure).
//! `RAYON_NUM_THREADS` caps the worker threads.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ehyclus_core::clustering::Method;
use ehyclus_core::io::{self, ResultFormat, SampleFormat};
use ehyclus_core::pipeline::{
    self, bench, build_index_datasets, combination_label, run_pipeline, IndexFamily,
    PipelineConfig, Timing,
};
use ehyclus_core::simulate::DatasetId;
use ehyclus_core::smoothing::fit_bspline;
use ehyclus_core::{Error, Sample64};

#[derive(Parser)]
#[command(
    name = "ehyclus",
    version,
    about = "Epigraph/hypograph index clustering for multivariate functional data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one of the synthetic benchmark datasets and write it out.
    Simulate(SimulateArgs),
    /// Smooth a sample, build index datasets, cluster, and report.
    Run(RunArgs),
    /// Regenerate a dataset over replicates and aggregate the method grid.
    Bench(BenchArgs),
    /// Emit the first two columns of one index dataset for scatter plots.
    PlotData(PlotDataArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Dataset to generate: ds1, ds2, ds3, ds4.
    #[arg(long)]
    dataset: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output path (a directory for wide format, a file for long).
    #[arg(long)]
    out: PathBuf,
    /// Sample layout: wide or long.
    #[arg(long, default_value = "wide")]
    format: String,
}

#[derive(Args)]
struct PipelineArgs {
    /// Number of B-spline basis functions.
    #[arg(long, default_value_t = 35)]
    nbasis: usize,
    /// Cluster count; 0 means the number of distinct ground-truth labels.
    #[arg(long, default_value_t = 0)]
    k: usize,
    /// Index family: joint, uniform_weighted, covariance_weighted.
    #[arg(long, default_value = "joint")]
    family: String,
    /// Comma-separated index dataset names (default: all 15).
    #[arg(long)]
    datasets: Option<String>,
    /// Comma-separated method names (default: all 10).
    #[arg(long)]
    methods: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report zero wall times so emitted files are byte-reproducible.
    #[arg(long, default_value_t = false)]
    deterministic_timing: bool,
    /// Key = value file with the same names as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Gaussian kernel width override (default: median heuristic).
    #[arg(long)]
    gaussian_sigma: Option<f64>,
    /// Spectral affinity width override (default: median/4).
    #[arg(long)]
    spectral_sigma: Option<f64>,
    #[arg(long)]
    poly_degree: Option<u32>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    /// Input sample path, or the literal `weather` for the bundled data.
    #[arg(long)]
    input: String,
    /// Input layout: wide or long (ignored for `weather`).
    #[arg(long, default_value = "wide")]
    input_format: String,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Results file.
    #[arg(long)]
    out: PathBuf,
    /// Results layout: csv or json.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct BenchArgs {
    /// Dataset to benchmark: ds1, ds2, ds3, ds4.
    #[arg(long)]
    dataset: String,
    /// Replicates; falls back to the config file, then to 1.
    #[arg(long)]
    reps: Option<usize>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Aggregated table (CSV).
    #[arg(long)]
    out: PathBuf,
    /// Optional per-replicate rows file (CSV).
    #[arg(long)]
    rows_out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotDataArgs {
    /// Input sample path, or the literal `weather`.
    #[arg(long)]
    input: String,
    #[arg(long, default_value = "wide")]
    input_format: String,
    /// Index dataset to project, e.g. d.MEIMHI.
    #[arg(long)]
    dataset_name: String,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Run(args) => run(args),
        Command::Bench(args) => bench_cmd(args),
        Command::PlotData(args) => plot_data(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// Configuration mistakes exit 1; runtime failures exit 2.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Argument(_) | Error::UnknownName(_) | Error::Dimension(_) => 1,
        Error::Io { .. } | Error::Numerical(_) | Error::Degenerate(_) | Error::Format(_) => 2,
    }
}

fn simulate(args: SimulateArgs) -> Result<(), Error> {
    let dataset = DatasetId::parse(&args.dataset)?;
    let format = SampleFormat::parse(&args.format)?;
    let sample: Sample64 = dataset.generate(args.seed);
    io::write_sample(&sample, &args.out, format)?;
    println!(
        "wrote {} (n = {}, p = {}, m = {}) to {}",
        dataset,
        sample.n(),
        sample.p(),
        sample.m(),
        args.out.display()
    );
    Ok(())
}

/// Builds a `PipelineConfig` from an optional config file and the flags;
/// flags override file values.
fn resolve_config(args: &PipelineArgs) -> Result<PipelineConfig, Error> {
    let mut config = PipelineConfig::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut config, path)?;
    }

    config.n_basis = args.nbasis;
    config.k = args.k;
    config.family = IndexFamily::parse(&args.family)?;
    config.seed = args.seed;
    if args.deterministic_timing {
        config.timing = Timing::Zero;
    }
    if let Some(datasets) = &args.datasets {
        config.datasets = datasets.split(',').map(|s| s.trim().to_string()).collect();
    }
    if let Some(methods) = &args.methods {
        config.methods = methods
            .split(',')
            .map(|s| Method::parse(s.trim()))
            .collect::<Result<_, _>>()?;
    }
    if let Some(v) = args.gaussian_sigma {
        config.hyper.gaussian_sigma = Some(v);
    }
    if let Some(v) = args.spectral_sigma {
        config.hyper.spectral_sigma = Some(v);
    }
    if let Some(v) = args.poly_degree {
        config.hyper.poly_degree = v;
    }
    if let Some(v) = args.restarts {
        config.hyper.restarts = v;
    }
    if let Some(v) = args.max_iter {
        config.hyper.max_iter = v;
    }
    config.validate()?;
    Ok(config)
}

/// `key = value` lines, `#` comments; keys mirror the long flag names.
fn apply_config_file(config: &mut PipelineConfig, path: &PathBuf) -> Result<(), Error> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Format(format!(
                "{} line {}: expected 'key = value'",
                path.display(),
                line_no + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad_value = |what: &str| {
            Error::Format(format!(
                "{} line {}: {what} '{value}'",
                path.display(),
                line_no + 1
            ))
        };
        match key {
            "nbasis" => config.n_basis = value.parse().map_err(|_| bad_value("bad integer"))?,
            "k" => config.k = value.parse().map_err(|_| bad_value("bad integer"))?,
            "seed" => config.seed = value.parse().map_err(|_| bad_value("bad integer"))?,
            "replicates" => {
                config.replicates = value.parse().map_err(|_| bad_value("bad integer"))?
            }
            "family" => config.family = IndexFamily::parse(value)?,
            "datasets" => {
                config.datasets = value.split(',').map(|s| s.trim().to_string()).collect()
            }
            "methods" => {
                config.methods = value
                    .split(',')
                    .map(|s| Method::parse(s.trim()))
                    .collect::<Result<_, _>>()?
            }
            "deterministic_timing" => {
                let flag: bool = value.parse().map_err(|_| bad_value("bad boolean"))?;
                config.timing = if flag { Timing::Zero } else { Timing::Wall };
            }
            "gaussian_sigma" => {
                config.hyper.gaussian_sigma =
                    Some(value.parse().map_err(|_| bad_value("bad number"))?)
            }
            "spectral_sigma" => {
                config.hyper.spectral_sigma =
                    Some(value.parse().map_err(|_| bad_value("bad number"))?)
            }
            "poly_degree" => {
                config.hyper.poly_degree = value.parse().map_err(|_| bad_value("bad integer"))?
            }
            "restarts" => {
                config.hyper.restarts = value.parse().map_err(|_| bad_value("bad integer"))?
            }
            "max_iter" => {
                config.hyper.max_iter = value.parse().map_err(|_| bad_value("bad integer"))?
            }
            other => {
                return Err(Error::UnknownName(format!(
                    "{} line {}: unknown config key '{other}'",
                    path.display(),
                    line_no + 1
                )))
            }
        }
    }
    Ok(())
}

fn load_input(input: &str, input_format: &str) -> Result<Sample64, Error> {
    if input == "weather" {
        io::canadian_weather()
    } else {
        io::read_sample(input, SampleFormat::parse(input_format)?)
    }
}

fn run(args: RunArgs) -> Result<(), Error> {
    let config = resolve_config(&args.pipeline)?;
    let format = ResultFormat::parse(&args.format)?;
    let sample = load_input(&args.input, &args.input_format)?;

    if sample.labels().is_some() {
        let outcome = run_pipeline(&sample, &config, 0)?;
        for f in &outcome.failures {
            eprintln!("cell failed: {} {}: {}", f.dataset_name, f.method_name, f.message);
        }
        io::write_results(&outcome.rows, &args.out, format)?;
        let mut best: Vec<&io::ResultRow> = outcome.rows.iter().collect();
        best.sort_by(|a, b| b.report.rand_index.total_cmp(&a.report.rand_index));
        println!(
            "{} combinations evaluated; best: {} (RI {:.4}); results in {}",
            outcome.rows.len(),
            combination_label(
                Method::parse(&best[0].method_name)?,
                &best[0].dataset_name
            ),
            best[0].report.rand_index,
            args.out.display()
        );
    } else {
        // No ground truth: emit bare partitions.
        let k = if config.k == 0 {
            return Err(Error::Argument(
                "unlabeled input needs an explicit --k".into(),
            ));
        } else {
            config.k
        };
        let smoothed = fit_bspline(&sample, config.n_basis, config.spline_order)?;
        let all = build_index_datasets(&smoothed, config.family)?;
        let selected: Vec<_> = all
            .into_iter()
            .filter(|(name, _)| config.datasets.iter().any(|d| d == name))
            .collect();
        let results = pipeline::run_grid_partitions(
            &selected,
            &config.methods,
            k,
            config.seed,
            &config.hyper,
        );
        let mut partitions = Vec::new();
        for (dataset, method, outcome) in results {
            match outcome {
                Ok(p) => partitions.push((dataset, method, p)),
                Err(e) => eprintln!("cell failed: {dataset} {method}: {e}"),
            }
        }
        io::write_partitions(&partitions, &args.out)?;
        println!(
            "no labels in input; wrote {} partitions to {}",
            partitions.len(),
            args.out.display()
        );
    }
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<(), Error> {
    let dataset = DatasetId::parse(&args.dataset)?;
    let config = resolve_config(&args.pipeline)?;
    let reps = args.reps.unwrap_or(config.replicates);
    let outcome = bench(dataset, reps, config.seed, &config)?;
    for f in &outcome.failures {
        eprintln!("cell failed: {} {}: {}", f.dataset_name, f.method_name, f.message);
    }
    io::write_aggregate(&outcome.aggregate, &args.out)?;
    if let Some(rows_out) = &args.rows_out {
        io::write_results(&outcome.rows, rows_out, ResultFormat::Csv)?;
    }
    println!(
        "{reps} replicates of {dataset} -> {} combinations; top 5 by mean RI:",
        outcome.aggregate.len()
    );
    for row in outcome.aggregate.iter().take(5) {
        println!(
            "  {:<40} purity {:.4}  F {:.4}  RI {:.4}  time {:.5}s",
            combination_label(Method::parse(&row.method_name)?, &row.dataset_name),
            row.purity,
            row.f_measure,
            row.rand_index,
            row.time_seconds
        );
    }
    println!("aggregated table in {}", args.out.display());
    Ok(())
}

fn plot_data(args: PlotDataArgs) -> Result<(), Error> {
    let config = resolve_config(&args.pipeline)?;
    io::validate_dataset_name(&args.dataset_name)?;
    let sample = load_input(&args.input, &args.input_format)?;
    let smoothed = fit_bspline(&sample, config.n_basis, config.spline_order)?;
    let datasets = build_index_datasets(&smoothed, config.family)?;
    let (_, matrix) = datasets
        .iter()
        .find(|(name, _)| name == &args.dataset_name)
        .expect("validated dataset name exists in the catalog");
    pipeline::emit_plot_data(matrix, sample.labels(), &args.out)?;
    println!(
        "wrote {} rows of {} to {}",
        matrix.n_rows(),
        args.dataset_name,
        args.out.display()
    );
    Ok(())
}
