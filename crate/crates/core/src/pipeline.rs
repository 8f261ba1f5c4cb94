//! The EHyClus pipeline: smooth, differentiate, index, cluster, evaluate.
//!
//! Four steps, all deterministic given `(input, config)`:
//!
//! 1. fit every curve on a shared cubic B-spline basis;
//! 2. evaluate the fit and its first and second derivatives on the grid
//!    and compute `MEI`/`MHI` on each level (joint, uniform-weighted, or
//!    covariance-weighted family);
//! 3. assemble the 15 named feature matrices combining the levels with
//!    the index sets;
//! 4. run the method grid on every feature matrix, score each partition
//!    against the ground truth, and aggregate over replicates.
//!
//! Grid cells run in parallel; every cell derives its own RNG seed from
//! `(seed, replicate, dataset, method)`, so the thread schedule never
//! changes a result.

use std::time::Instant;

use rayon::prelude::*;

use crate::clustering::{cluster, FeatureMatrix, Hyperparams, Method, MethodSpec};
use crate::error::{Error, Result};
use crate::fda::{MultivariateFunctionalSample, Partition};
use crate::indexes::{covariance_weights, mei_mhi, weighted_mei_mhi, WeightVector};
use crate::io::{AggregateRow, ResultRow, INDEX_DATASET_NAMES};
use crate::metrics::evaluate;
use crate::scalar::Real;
use crate::simulate::DatasetId;
use crate::smoothing::{eval_derivative, fit_bspline, SmoothedSample};

/// Which multivariate index definition feeds the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IndexFamily {
    /// The joint definition: all components simultaneously.
    Joint,
    /// Weighted average of univariate indexes, uniform weights.
    UniformWeighted,
    /// Weighted average with covariance-eigenvalue weights.
    CovarianceWeighted,
}

impl IndexFamily {
    pub fn name(&self) -> &'static str {
        match self {
            IndexFamily::Joint => "joint",
            IndexFamily::UniformWeighted => "uniform_weighted",
            IndexFamily::CovarianceWeighted => "covariance_weighted",
        }
    }

    pub fn parse(name: &str) -> Result<IndexFamily> {
        match name {
            "joint" => Ok(IndexFamily::Joint),
            "uniform_weighted" => Ok(IndexFamily::UniformWeighted),
            "covariance_weighted" => Ok(IndexFamily::CovarianceWeighted),
            other => Err(Error::UnknownName(format!(
                "index family '{other}' is not one of: joint, uniform_weighted, covariance_weighted"
            ))),
        }
    }
}

/// How cell wall times are reported.
///
/// Result files are specified to be byte-identical across reruns, which a
/// measured wall time cannot be; `Zero` pins the time column for
/// reproducibility-sensitive runs while `Wall` reports real timings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Timing {
    Wall,
    Zero,
}

/// Full pipeline configuration with the benchmark defaults.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub n_basis: usize,
    pub spline_order: usize,
    /// Target cluster count; 0 means "use the dataset's natural k".
    pub k: usize,
    pub family: IndexFamily,
    /// Index dataset names to run; defaults to all 15.
    pub datasets: Vec<String>,
    /// Methods to run; defaults to all 10.
    pub methods: Vec<Method>,
    pub seed: u64,
    pub replicates: usize,
    pub hyper: Hyperparams,
    pub timing: Timing,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            n_basis: 35,
            spline_order: 4,
            k: 0,
            family: IndexFamily::Joint,
            datasets: INDEX_DATASET_NAMES.iter().map(|s| s.to_string()).collect(),
            methods: Method::ALL.to_vec(),
            seed: 0,
            replicates: 1,
            hyper: Hyperparams::default(),
            timing: Timing::Wall,
        }
    }
}

impl PipelineConfig {
    /// Validates the dataset and method subsets against the closed
    /// vocabularies.
    pub fn validate(&self) -> Result<()> {
        if self.datasets.is_empty() || self.methods.is_empty() {
            return Err(Error::Argument(
                "need at least one dataset and one method".into(),
            ));
        }
        for name in &self.datasets {
            crate::io::validate_dataset_name(name)?;
        }
        if self.n_basis < self.spline_order {
            return Err(Error::Argument(format!(
                "n_basis ({}) must be at least the spline order ({})",
                self.n_basis, self.spline_order
            )));
        }
        Ok(())
    }
}

/// The three data levels the indexes are computed on.
const LEVEL_PREFIXES: [&str; 3] = ["", "d", "d2"];

/// Catalog entry: dataset name, the derivative levels it uses, and which
/// of (MEI, MHI) it keeps per level.
struct CatalogEntry {
    name: &'static str,
    levels: &'static [usize],
    keep_mei: bool,
    keep_mhi: bool,
}

const CATALOG: [CatalogEntry; 15] = [
    CatalogEntry { name: "_.MEIMHI", levels: &[0], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "d.MEIMHI", levels: &[1], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "d2.MEIMHI", levels: &[2], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "_d.MEIMHI", levels: &[0, 1], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "_d2.MEIMHI", levels: &[0, 2], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "dd2.MEIMHI", levels: &[1, 2], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "_dd2.MEIMHI", levels: &[0, 1, 2], keep_mei: true, keep_mhi: true },
    CatalogEntry { name: "_d.MEI", levels: &[0, 1], keep_mei: true, keep_mhi: false },
    CatalogEntry { name: "_d2.MEI", levels: &[0, 2], keep_mei: true, keep_mhi: false },
    CatalogEntry { name: "dd2.MEI", levels: &[1, 2], keep_mei: true, keep_mhi: false },
    CatalogEntry { name: "_dd2.MEI", levels: &[0, 1, 2], keep_mei: true, keep_mhi: false },
    CatalogEntry { name: "_d.MHI", levels: &[0, 1], keep_mei: false, keep_mhi: true },
    CatalogEntry { name: "_d2.MHI", levels: &[0, 2], keep_mei: false, keep_mhi: true },
    CatalogEntry { name: "dd2.MHI", levels: &[1, 2], keep_mei: false, keep_mhi: true },
    CatalogEntry { name: "_dd2.MHI", levels: &[0, 1, 2], keep_mei: false, keep_mhi: true },
];

/// `MEI`/`MHI` of one evaluated data level under the requested family.
fn level_indexes<F: Real>(
    level: &MultivariateFunctionalSample<F>,
    family: IndexFamily,
) -> Result<(Vec<F>, Vec<F>)> {
    match family {
        IndexFamily::Joint => {
            let (mei, mhi) = mei_mhi(level);
            Ok((mei.into_values(), mhi.into_values()))
        }
        IndexFamily::UniformWeighted => {
            let w = WeightVector::uniform(level.p())?;
            let (mei, mhi) = weighted_mei_mhi(level, &w)?;
            Ok((mei.into_values(), mhi.into_values()))
        }
        IndexFamily::CovarianceWeighted => {
            let w = covariance_weights(level)?;
            let (mei, mhi) = weighted_mei_mhi(level, &w)?;
            Ok((mei.into_values(), mhi.into_values()))
        }
    }
}

/// Builds the 15 named index datasets from a smoothed sample: indexes on
/// the smoothed curves and their first and second derivatives, combined
/// per the catalog. Column names follow the level prefixes
/// (`MEI, MHI, dMEI, dMHI, d2MEI, d2MHI`).
pub fn build_index_datasets<F: Real>(
    smoothed: &SmoothedSample<F>,
    family: IndexFamily,
) -> Result<Vec<(String, FeatureMatrix<F>)>> {
    let mut per_level = Vec::with_capacity(3);
    for deriv in 0..=2 {
        let level = eval_derivative(smoothed, deriv)?;
        per_level.push(level_indexes(&level, family)?);
    }
    let n = smoothed.n();

    let mut out = Vec::with_capacity(CATALOG.len());
    for entry in &CATALOG {
        let mut names = Vec::new();
        let mut columns: Vec<&[F]> = Vec::new();
        for &lvl in entry.levels {
            let (ref mei, ref mhi) = per_level[lvl];
            if entry.keep_mei {
                names.push(format!("{}MEI", LEVEL_PREFIXES[lvl]));
                columns.push(mei);
            }
            if entry.keep_mhi {
                names.push(format!("{}MHI", LEVEL_PREFIXES[lvl]));
                columns.push(mhi);
            }
        }
        let q = columns.len();
        let mut data = Vec::with_capacity(n * q);
        for i in 0..n {
            for col in &columns {
                data.push(col[i]);
            }
        }
        out.push((
            entry.name.to_string(),
            FeatureMatrix::new(data, n, q, names)?,
        ));
    }
    Ok(out)
}

/// Stable FNV-1a over bytes; the basis of cell seed derivation.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Seed of one grid cell, stable across runs and thread schedules.
pub fn cell_seed(seed: u64, replicate: usize, dataset: &str, method: Method) -> u64 {
    splitmix64(
        seed ^ splitmix64(replicate as u64)
            ^ fnv1a(dataset.as_bytes())
            ^ fnv1a(method.name().as_bytes()),
    )
}

/// Seed of one benchmark replicate.
pub fn replicate_seed(seed: u64, replicate: usize) -> u64 {
    splitmix64(seed ^ splitmix64(0xBEEF ^ replicate as u64))
}

/// A grid cell that failed; recorded, never fatal.
#[derive(Debug, Clone)]
pub struct CellFailure {
    pub dataset_name: String,
    pub method_name: String,
    pub message: String,
}

/// Result rows plus any per-cell failures of one grid run.
#[derive(Debug, Clone, Default)]
pub struct GridOutcome {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<CellFailure>,
}

/// Runs `methods` on every named feature matrix and scores the partitions
/// against `truth`. One row per (dataset, method); failures are recorded
/// as [`CellFailure`]s without aborting the grid.
#[allow(clippy::too_many_arguments)]
pub fn run_grid<F: Real>(
    datasets: &[(String, FeatureMatrix<F>)],
    methods: &[Method],
    k: usize,
    seed: u64,
    hyper: &Hyperparams,
    truth: &Partition,
    replicate: usize,
    timing: Timing,
) -> GridOutcome {
    let cells: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..methods.len()).map(move |m| (d, m)))
        .collect();

    let results: Vec<std::result::Result<ResultRow, CellFailure>> = cells
        .par_iter()
        .map(|&(d, m)| {
            let (name, data) = &datasets[d];
            let method = methods[m];
            let this_seed = cell_seed(seed, replicate, name, method);
            let spec = MethodSpec {
                method,
                k,
                seed: this_seed,
                hyper: hyper.clone(),
            };
            let started = Instant::now();
            let partition = cluster(data, &spec).map_err(|e| CellFailure {
                dataset_name: name.clone(),
                method_name: method.name().to_string(),
                message: e.to_string(),
            })?;
            let elapsed = started.elapsed().as_secs_f64();
            let mut report = evaluate(&partition, truth).map_err(|e| CellFailure {
                dataset_name: name.clone(),
                method_name: method.name().to_string(),
                message: e.to_string(),
            })?;
            report.elapsed_seconds = match timing {
                Timing::Wall => elapsed,
                Timing::Zero => 0.0,
            };
            ResultRow::new(name, method, report, replicate, this_seed).map_err(|e| CellFailure {
                dataset_name: name.clone(),
                method_name: method.name().to_string(),
                message: e.to_string(),
            })
        })
        .collect();

    let mut outcome = GridOutcome::default();
    for r in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(f) => outcome.failures.push(f),
        }
    }
    outcome
}

/// Partitions per (dataset, method) without evaluation, for unlabeled
/// inputs.
pub fn run_grid_partitions<F: Real>(
    datasets: &[(String, FeatureMatrix<F>)],
    methods: &[Method],
    k: usize,
    seed: u64,
    hyper: &Hyperparams,
) -> Vec<(String, String, Result<Partition>)> {
    let cells: Vec<(usize, usize)> = (0..datasets.len())
        .flat_map(|d| (0..methods.len()).map(move |m| (d, m)))
        .collect();
    cells
        .par_iter()
        .map(|&(d, m)| {
            let (name, data) = &datasets[d];
            let method = methods[m];
            let spec = MethodSpec {
                method,
                k,
                seed: cell_seed(seed, 0, name, method),
                hyper: hyper.clone(),
            };
            (
                name.clone(),
                method.name().to_string(),
                cluster(data, &spec),
            )
        })
        .collect()
}

/// Smooths a labeled sample and runs the configured grid once.
///
/// `config.k = 0` resolves to the number of distinct labels.
pub fn run_pipeline<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    config: &PipelineConfig,
    replicate: usize,
) -> Result<GridOutcome> {
    config.validate()?;
    let labels = sample.labels().ok_or_else(|| {
        Error::Argument("pipeline evaluation needs ground-truth labels".into())
    })?;
    let truth = Partition::from_labels(labels)?;
    let k = if config.k == 0 { truth.k() } else { config.k };

    let smoothed = fit_bspline(sample, config.n_basis, config.spline_order)?;
    let all = build_index_datasets(&smoothed, config.family)?;
    let selected: Vec<(String, FeatureMatrix<F>)> = all
        .into_iter()
        .filter(|(name, _)| config.datasets.iter().any(|d| d == name))
        .collect();
    Ok(run_grid(
        &selected,
        &config.methods,
        k,
        config.seed,
        &config.hyper,
        &truth,
        replicate,
        config.timing,
    ))
}

/// Everything a benchmark run produces: the per-replicate rows and the
/// aggregated table sorted by mean Rand index (descending, ties by names).
#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub rows: Vec<ResultRow>,
    pub aggregate: Vec<AggregateRow>,
    pub failures: Vec<CellFailure>,
}

/// Regenerates `dataset` once per replicate under derived seeds, runs the
/// grid each time, and aggregates mean metrics per combination.
pub fn bench(
    dataset: DatasetId,
    replicates: usize,
    seed: u64,
    config: &PipelineConfig,
) -> Result<BenchOutcome> {
    if replicates == 0 {
        return Err(Error::Argument("bench needs at least one replicate".into()));
    }
    config.validate()?;
    if config.k == 1 {
        return Err(Error::Argument(
            "benchmark runs need k >= 2 (or k = 0 for the dataset's natural k)".into(),
        ));
    }

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for replicate in 0..replicates {
        let rep_seed = replicate_seed(seed, replicate);
        let sample: MultivariateFunctionalSample<f64> = dataset.generate(rep_seed);
        let mut rep_config = config.clone();
        rep_config.seed = rep_seed;
        if rep_config.k == 0 {
            rep_config.k = dataset.k();
        }
        let outcome = run_pipeline(&sample, &rep_config, replicate)?;
        rows.extend(outcome.rows);
        failures.extend(outcome.failures);
    }

    Ok(BenchOutcome {
        aggregate: aggregate_rows(&rows),
        rows,
        failures,
    })
}

/// Mean metrics per (dataset, method), sorted by mean Rand index
/// descending with ties broken by dataset then method name.
pub fn aggregate_rows(rows: &[ResultRow]) -> Vec<AggregateRow> {
    type MetricSums = (f64, f64, f64, f64, usize);
    let mut order: Vec<(String, String)> = Vec::new();
    let mut acc: std::collections::HashMap<(String, String), MetricSums> =
        std::collections::HashMap::new();
    for r in rows {
        let key = (r.dataset_name.clone(), r.method_name.clone());
        if !acc.contains_key(&key) {
            order.push(key.clone());
        }
        let slot = acc.entry(key).or_insert((0.0, 0.0, 0.0, 0.0, 0));
        slot.0 += r.report.purity;
        slot.1 += r.report.f_measure;
        slot.2 += r.report.rand_index;
        slot.3 += r.report.elapsed_seconds;
        slot.4 += 1;
    }
    let mut aggregate: Vec<AggregateRow> = order
        .into_iter()
        .map(|key| {
            let (p, f, ri, t, c) = acc[&key];
            AggregateRow {
                dataset_name: key.0,
                method_name: key.1,
                purity: p / c as f64,
                f_measure: f / c as f64,
                rand_index: ri / c as f64,
                time_seconds: t / c as f64,
                replicates: c,
            }
        })
        .collect();
    aggregate.sort_by(|a, b| {
        b.rand_index
            .total_cmp(&a.rand_index)
            .then_with(|| a.dataset_name.cmp(&b.dataset_name))
            .then_with(|| a.method_name.cmp(&b.method_name))
    });
    aggregate
}

/// Paper-style combination label, e.g. `kmeans.dd2.MEIMHI-euclidean` or
/// `spc.d.MEIMHI`.
pub fn combination_label(method: Method, dataset_name: &str) -> String {
    match method {
        Method::Single | Method::Complete | Method::Average | Method::Centroid => {
            format!("{}.{dataset_name}-euclidean", method.name())
        }
        Method::WardD2 => format!("ward.D2.{dataset_name}-euclidean"),
        Method::KMeansEuclidean => format!("kmeans.{dataset_name}-euclidean"),
        Method::KMeansMahalanobis => format!("kmeans.{dataset_name}-mahalanobis"),
        Method::KernelKMeansGaussian => format!("kkmeans.{dataset_name}-gaussian"),
        Method::KernelKMeansPolynomial => format!("kkmeans.{dataset_name}-polynomial"),
        Method::Spectral => format!("spc.{dataset_name}"),
    }
}

/// Writes the first two index columns of a feature matrix (plus labels,
/// when given) as a scatter-plot CSV.
pub fn emit_plot_data<F: Real>(
    index_dataset: &FeatureMatrix<F>,
    labels: Option<&[usize]>,
    path: impl AsRef<std::path::Path>,
) -> Result<()> {
    if index_dataset.n_cols() < 2 {
        return Err(Error::Argument(
            "plot data needs at least two index columns".into(),
        ));
    }
    if let Some(l) = labels {
        if l.len() != index_dataset.n_rows() {
            return Err(Error::Dimension(format!(
                "{} labels for {} rows",
                l.len(),
                index_dataset.n_rows()
            )));
        }
    }
    let names = index_dataset.column_names();
    let mut out = format!("{},{}", names[0], names[1]);
    if labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for i in 0..index_dataset.n_rows() {
        let row = index_dataset.row(i);
        use std::fmt::Write as _;
        let _ = write!(out, "{},{}", row[0], row[1]);
        if let Some(l) = labels {
            let _ = write!(out, ",{}", l[i]);
        }
        out.push('\n');
    }
    std::fs::write(path.as_ref(), out)
        .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate::gen_ds4;

    #[test]
    fn catalog_matches_the_io_vocabulary() {
        let catalog_names: Vec<&str> = CATALOG.iter().map(|e| e.name).collect();
        assert_eq!(catalog_names.as_slice(), INDEX_DATASET_NAMES.as_slice());
    }

    #[test]
    fn fifteen_datasets_with_documented_shapes() {
        let sample: MultivariateFunctionalSample<f64> = gen_ds4(7);
        let smoothed = fit_bspline(&sample, 35, 4).unwrap();
        let datasets = build_index_datasets(&smoothed, IndexFamily::Joint).unwrap();
        assert_eq!(datasets.len(), 15);

        let by_name: std::collections::HashMap<&str, &FeatureMatrix<f64>> = datasets
            .iter()
            .map(|(n, m)| (n.as_str(), m))
            .collect();
        assert_eq!(by_name["_d.MEI"].n_cols(), 2);
        assert_eq!(by_name["_dd2.MEIMHI"].n_cols(), 6);
        assert_eq!(
            by_name["_dd2.MEIMHI"].column_names(),
            &["MEI", "MHI", "dMEI", "dMHI", "d2MEI", "d2MHI"]
        );
        assert_eq!(by_name["dd2.MEIMHI"].column_names(), &["dMEI", "dMHI", "d2MEI", "d2MHI"]);

        for (name, matrix) in &datasets {
            assert_eq!(matrix.n_rows(), 100, "{name}");
            for v in matrix.values() {
                assert!((0.0..=1.0).contains(v), "{name}: {v} outside [0,1]");
            }
        }
    }

    #[test]
    fn weighted_families_also_build() {
        let sample: MultivariateFunctionalSample<f64> = gen_ds4(9);
        let smoothed = fit_bspline(&sample, 35, 4).unwrap();
        for family in [IndexFamily::UniformWeighted, IndexFamily::CovarianceWeighted] {
            let datasets = build_index_datasets(&smoothed, family).unwrap();
            assert_eq!(datasets.len(), 15);
        }
    }

    #[test]
    fn grid_produces_one_row_per_cell() {
        let sample: MultivariateFunctionalSample<f64> = gen_ds4(3);
        let config = PipelineConfig {
            datasets: vec!["d.MEIMHI".into(), "_d.MEI".into()],
            methods: vec![Method::Complete, Method::KMeansEuclidean, Method::Spectral],
            seed: 5,
            ..PipelineConfig::default()
        };
        let outcome = run_pipeline(&sample, &config, 0).unwrap();
        assert!(outcome.failures.is_empty());
        assert_eq!(outcome.rows.len(), 6);
        for row in &outcome.rows {
            assert!(row.report.rand_index >= 0.0 && row.report.rand_index <= 1.0);
        }
    }

    #[test]
    fn grid_is_deterministic_modulo_timing() {
        let sample: MultivariateFunctionalSample<f64> = gen_ds4(11);
        let config = PipelineConfig {
            datasets: vec!["d.MEIMHI".into()],
            methods: vec![Method::KMeansEuclidean, Method::Spectral],
            seed: 19,
            timing: Timing::Zero,
            ..PipelineConfig::default()
        };
        let a = run_pipeline(&sample, &config, 0).unwrap();
        let b = run_pipeline(&sample, &config, 0).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn config_rejects_unknown_names() {
        let config = PipelineConfig {
            datasets: vec!["d.MEIHI".into()],
            ..PipelineConfig::default()
        };
        let err = config.validate().unwrap_err();
        assert!(err.to_string().contains("_dd2.MHI"), "{err}");
    }

    #[test]
    fn bench_single_replicate_equals_its_rows() {
        let config = PipelineConfig {
            datasets: vec!["_.MEIMHI".into()],
            methods: vec![Method::WardD2],
            timing: Timing::Zero,
            ..PipelineConfig::default()
        };
        let out = bench(DatasetId::Ds4, 1, 77, &config).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.aggregate.len(), 1);
        let (row, agg) = (&out.rows[0], &out.aggregate[0]);
        assert_eq!(agg.rand_index, row.report.rand_index);
        assert_eq!(agg.purity, row.report.purity);
        assert_eq!(agg.replicates, 1);
    }

    #[test]
    fn combination_labels_follow_the_paper_style() {
        assert_eq!(
            combination_label(Method::KMeansEuclidean, "dd2.MEIMHI"),
            "kmeans.dd2.MEIMHI-euclidean"
        );
        assert_eq!(combination_label(Method::Spectral, "d.MEIMHI"), "spc.d.MEIMHI");
        assert_eq!(
            combination_label(Method::WardD2, "_d.MEI"),
            "ward.D2._d.MEI-euclidean"
        );
    }

    #[test]
    fn plot_data_has_expected_shape() {
        let sample: MultivariateFunctionalSample<f64> = gen_ds4(13);
        let smoothed = fit_bspline(&sample, 35, 4).unwrap();
        let datasets = build_index_datasets(&smoothed, IndexFamily::Joint).unwrap();
        let (name, matrix) = datasets.iter().find(|(n, _)| n == "d.MEIMHI").unwrap();
        assert_eq!(name, "d.MEIMHI");

        let dir = std::env::temp_dir().join(format!("ehyclus-plot-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("plot.csv");
        emit_plot_data(matrix, sample.labels(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 101);
        assert_eq!(lines[0], "dMEI,dMHI,label");
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 3);
            for f in &fields[..2] {
                let v: f64 = f.parse().unwrap();
                assert!((0.0..=1.0).contains(&v));
            }
        }
    }

    #[test]
    fn cell_seeds_differ_across_cells() {
        let a = cell_seed(1, 0, "d.MEIMHI", Method::Single);
        let b = cell_seed(1, 0, "d.MEIMHI", Method::Complete);
        let c = cell_seed(1, 0, "d2.MEIMHI", Method::Single);
        let d = cell_seed(1, 1, "d.MEIMHI", Method::Single);
        assert!(a != b && a != c && a != d);
        assert_eq!(a, cell_seed(1, 0, "d.MEIMHI", Method::Single));
    }
}
