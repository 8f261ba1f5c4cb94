//! File formats: functional samples as CSV, results as CSV/JSON, and the
//! bundled Canadian Weather data.
//!
//! Two sample layouts are supported (UTF-8, comma separators, `.` decimal
//! point, LF line endings):
//!
//! * **long** — a single file with header `curve_id,dim,t,value`, one row
//!   per evaluation, dims numbered from 1;
//! * **wide** — a directory with one file per dimension (`dim1.csv`,
//!   `dim2.csv`, ...), each holding a `curve_id` column followed by one
//!   numeric column per grid point; the numeric headers are the grid and
//!   must agree across files.
//!
//! Ground-truth labels travel in a sidecar (`labels.csv` in the wide
//! directory; `<stem>.labels.csv` next to a long file) with header
//! `curve_id,label`. Floats are written in shortest round-trip form, so
//! `read(write(x)) == x` and emission is byte-deterministic.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::clustering::Method;
use crate::error::{Error, Result};
use crate::fda::{Grid, MultivariateFunctionalSample};
use crate::metrics::EvaluationReport;
use crate::scalar::Real;

/// On-disk layout of a functional sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Long,
    Wide,
}

impl SampleFormat {
    pub fn parse(name: &str) -> Result<SampleFormat> {
        match name {
            "long" => Ok(SampleFormat::Long),
            "wide" => Ok(SampleFormat::Wide),
            other => Err(Error::UnknownName(format!(
                "sample format '{other}' is not one of: long, wide"
            ))),
        }
    }
}

/// Output layout of a results table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResultFormat {
    Csv,
    Json,
}

impl ResultFormat {
    pub fn parse(name: &str) -> Result<ResultFormat> {
        match name {
            "csv" => Ok(ResultFormat::Csv),
            "json" => Ok(ResultFormat::Json),
            other => Err(Error::UnknownName(format!(
                "result format '{other}' is not one of: csv, json"
            ))),
        }
    }
}

/// The closed vocabulary of index dataset names: combinations of data
/// levels (`_` curves, `d` first derivatives, `d2` second derivatives)
/// with the index sets applied to them.
pub const INDEX_DATASET_NAMES: [&str; 15] = [
    "_.MEIMHI",
    "d.MEIMHI",
    "d2.MEIMHI",
    "_d.MEIMHI",
    "_d2.MEIMHI",
    "dd2.MEIMHI",
    "_dd2.MEIMHI",
    "_d.MEI",
    "_d2.MEI",
    "dd2.MEI",
    "_dd2.MEI",
    "_d.MHI",
    "_d2.MHI",
    "dd2.MHI",
    "_dd2.MHI",
];

/// Validates an index dataset name against the closed vocabulary.
pub fn validate_dataset_name(name: &str) -> Result<()> {
    if INDEX_DATASET_NAMES.contains(&name) {
        Ok(())
    } else {
        Err(Error::UnknownName(format!(
            "dataset '{name}' is not one of: {}",
            INDEX_DATASET_NAMES.join(", ")
        )))
    }
}

/// One (dataset, method) evaluation: the row of every results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub dataset_name: String,
    pub method_name: String,
    pub report: EvaluationReport,
    pub replicate: usize,
    pub seed: u64,
}

impl ResultRow {
    /// Builds a row, validating both names against their vocabularies.
    pub fn new(
        dataset_name: &str,
        method: Method,
        report: EvaluationReport,
        replicate: usize,
        seed: u64,
    ) -> Result<Self> {
        validate_dataset_name(dataset_name)?;
        Ok(ResultRow {
            dataset_name: dataset_name.to_string(),
            method_name: method.name().to_string(),
            report,
            replicate,
            seed,
        })
    }
}

// ---------------------------------------------------------------------------
// sample reading
// ---------------------------------------------------------------------------

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn parse_value(field: &str, context: impl Fn() -> String) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| Error::Format(format!("{}: '{field}' is not a number", context())))?;
    if !v.is_finite() {
        return Err(Error::Format(format!(
            "{}: non-finite value '{field}'",
            context()
        )));
    }
    Ok(v)
}

/// One parsed wide-format dimension file: ordered curve ids, grid, and the
/// per-curve value rows.
struct WideDimension {
    grid: Vec<f64>,
    curve_ids: Vec<String>,
    rows: Vec<Vec<f64>>,
}

fn parse_wide_dimension(text: &str, file_label: &str) -> Result<WideDimension> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{file_label}: empty file")))?;
    let mut header_fields = header.split(',');
    let id_field = header_fields.next().unwrap_or_default();
    if id_field.trim() != "curve_id" {
        return Err(Error::Format(format!(
            "{file_label}: header must start with 'curve_id', got '{id_field}'"
        )));
    }
    let grid: Vec<f64> = header_fields
        .enumerate()
        .map(|(i, f)| parse_value(f, || format!("{file_label}: header column {}", i + 2)))
        .collect::<Result<_>>()?;
    if grid.len() < 2 {
        return Err(Error::Format(format!(
            "{file_label}: need at least two grid columns"
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Format(format!(
            "{file_label}: grid headers must be strictly increasing"
        )));
    }

    let mut curve_ids = Vec::new();
    let mut rows = Vec::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let id = fields.next().unwrap_or_default().trim().to_string();
        let values: Vec<f64> = fields
            .enumerate()
            .map(|(i, f)| {
                parse_value(f, || {
                    format!("{file_label} line {} (curve '{id}') column {}", line_no + 1, i + 2)
                })
            })
            .collect::<Result<_>>()?;
        if values.len() != grid.len() {
            return Err(Error::Format(format!(
                "{file_label} line {} (curve '{id}'): {} values for {} grid columns",
                line_no + 1,
                values.len(),
                grid.len()
            )));
        }
        if curve_ids.contains(&id) {
            return Err(Error::Format(format!(
                "{file_label} line {}: duplicate curve id '{id}'",
                line_no + 1
            )));
        }
        curve_ids.push(id);
        rows.push(values);
    }
    if curve_ids.is_empty() {
        return Err(Error::Format(format!("{file_label}: no curves")));
    }
    Ok(WideDimension {
        grid,
        curve_ids,
        rows,
    })
}

fn parse_labels(text: &str, file_label: &str) -> Result<HashMap<String, usize>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{file_label}: empty labels file")))?;
    if header.trim() != "curve_id,label" {
        return Err(Error::Format(format!(
            "{file_label}: labels header must be 'curve_id,label'"
        )));
    }
    let mut map = HashMap::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (id, label) = line.split_once(',').ok_or_else(|| {
            Error::Format(format!("{file_label} line {}: expected two fields", line_no + 1))
        })?;
        let label: usize = label.trim().parse().map_err(|_| {
            Error::Format(format!(
                "{file_label} line {}: label '{label}' is not a positive integer",
                line_no + 1
            ))
        })?;
        if label == 0 {
            return Err(Error::Format(format!(
                "{file_label} line {}: labels start at 1",
                line_no + 1
            )));
        }
        map.insert(id.trim().to_string(), label);
    }
    Ok(map)
}

fn attach_labels<F: Real>(
    sample: MultivariateFunctionalSample<F>,
    curve_ids: &[String],
    labels_path: &Path,
) -> Result<MultivariateFunctionalSample<F>> {
    if !labels_path.exists() {
        return Ok(sample);
    }
    let map = parse_labels(&read_to_string(labels_path)?, &labels_path.display().to_string())?;
    let labels: Vec<usize> = curve_ids
        .iter()
        .map(|id| {
            map.get(id).copied().ok_or_else(|| {
                Error::Format(format!(
                    "{}: no label for curve '{id}'",
                    labels_path.display()
                ))
            })
        })
        .collect::<Result<_>>()?;
    sample.with_labels(Some(labels))
}

fn wide_dimension_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = Vec::new();
    for k in 1.. {
        let candidate = dir.join(format!("dim{k}.csv"));
        if candidate.exists() {
            paths.push(candidate);
        } else {
            break;
        }
    }
    if paths.is_empty() {
        return Err(Error::Format(format!(
            "{}: no dim1.csv found (wide format wants dim1.csv, dim2.csv, ...)",
            dir.display()
        )));
    }
    Ok(paths)
}

fn read_wide<F: Real>(dir: &Path) -> Result<MultivariateFunctionalSample<F>> {
    let paths = wide_dimension_paths(dir)?;
    let mut dims = Vec::with_capacity(paths.len());
    for path in &paths {
        dims.push(parse_wide_dimension(
            &read_to_string(path)?,
            &path.display().to_string(),
        )?);
    }
    let first = &dims[0];
    for (k, d) in dims.iter().enumerate().skip(1) {
        if d.grid != first.grid {
            return Err(Error::Format(format!(
                "{}: grid differs from dim1.csv",
                paths[k].display()
            )));
        }
        if d.curve_ids != first.curve_ids {
            return Err(Error::Format(format!(
                "{}: curve ids differ from dim1.csv",
                paths[k].display()
            )));
        }
    }

    let (n, p, m) = (first.curve_ids.len(), dims.len(), first.grid.len());
    let mut values = Vec::with_capacity(n * p * m);
    for i in 0..n {
        for d in &dims {
            values.extend(d.rows[i].iter().map(|&v| F::of(v)));
        }
    }
    let grid = Grid::new(first.grid.iter().map(|&t| F::of(t)).collect())?;
    let sample = MultivariateFunctionalSample::new(values, n, p, grid, None)?;
    attach_labels(sample, &first.curve_ids, &dir.join("labels.csv"))
}

fn long_labels_path(path: &Path) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "sample".into());
    path.with_file_name(format!("{stem}.labels.csv"))
}

fn read_long<F: Real>(path: &Path) -> Result<MultivariateFunctionalSample<F>> {
    let text = read_to_string(path)?;
    let label = path.display().to_string();
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Format(format!("{label}: empty file")))?;
    if header.trim() != "curve_id,dim,t,value" {
        return Err(Error::Format(format!(
            "{label}: header must be 'curve_id,dim,t,value'"
        )));
    }

    // curve id -> dim -> (t, value) in file order.
    let mut curve_order: Vec<String> = Vec::new();
    let mut data: HashMap<String, HashMap<usize, Vec<(f64, f64)>>> = HashMap::new();
    for (line_no, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Format(format!(
                "{label} line {}: expected 4 fields, got {}",
                line_no + 1,
                fields.len()
            )));
        }
        let id = fields[0].trim().to_string();
        let dim: usize = fields[1].trim().parse().map_err(|_| {
            Error::Format(format!(
                "{label} line {}: dim '{}' is not a positive integer",
                line_no + 1,
                fields[1]
            ))
        })?;
        if dim == 0 {
            return Err(Error::Format(format!(
                "{label} line {}: dims are numbered from 1",
                line_no + 1
            )));
        }
        let t = parse_value(fields[2], || format!("{label} line {} (t)", line_no + 1))?;
        let v = parse_value(fields[3], || format!("{label} line {} (value)", line_no + 1))?;
        if !data.contains_key(&id) {
            curve_order.push(id.clone());
        }
        data.entry(id).or_default().entry(dim).or_default().push((t, v));
    }
    if curve_order.is_empty() {
        return Err(Error::Format(format!("{label}: no observations")));
    }

    let first_curve = &data[&curve_order[0]];
    let p = first_curve.len();
    let reference: Vec<f64> = {
        let series = first_curve.get(&1).ok_or_else(|| {
            Error::Format(format!("{label}: curve '{}' has no dim 1", curve_order[0]))
        })?;
        series.iter().map(|&(t, _)| t).collect()
    };
    if reference.len() < 2 || reference.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Format(format!(
            "{label}: grid of curve '{}' dim 1 is not strictly increasing (is t sorted?)",
            curve_order[0]
        )));
    }

    let m = reference.len();
    let mut values = Vec::with_capacity(curve_order.len() * p * m);
    for id in &curve_order {
        let dims = &data[id];
        if dims.len() != p {
            return Err(Error::Format(format!(
                "{label}: curve '{id}' has {} dims, expected {p}",
                dims.len()
            )));
        }
        for dim in 1..=p {
            let series = dims.get(&dim).ok_or_else(|| {
                Error::Format(format!("{label}: curve '{id}' is missing dim {dim}"))
            })?;
            if series.len() != m {
                return Err(Error::Format(format!(
                    "{label}: curve '{id}' dim {dim} has {} points, expected {m}",
                    series.len()
                )));
            }
            for (j, &(t, v)) in series.iter().enumerate() {
                if t != reference[j] {
                    return Err(Error::Format(format!(
                        "{label}: curve '{id}' dim {dim} grid point {j} is {t}, expected {}",
                        reference[j]
                    )));
                }
                values.push(F::of(v));
            }
        }
    }

    let grid = Grid::new(reference.iter().map(|&t| F::of(t)).collect())?;
    let sample = MultivariateFunctionalSample::new(values, curve_order.len(), p, grid, None)?;
    attach_labels(sample, &curve_order, &long_labels_path(path))
}

/// Reads a functional sample from disk (`Long`: a CSV file; `Wide`: a
/// directory of per-dimension CSVs). A labels sidecar is attached when
/// present.
pub fn read_sample<F: Real>(
    path: impl AsRef<Path>,
    format: SampleFormat,
) -> Result<MultivariateFunctionalSample<F>> {
    match format {
        SampleFormat::Wide => read_wide(path.as_ref()),
        SampleFormat::Long => read_long(path.as_ref()),
    }
}

// ---------------------------------------------------------------------------
// sample writing
// ---------------------------------------------------------------------------

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_labels_file<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    path: &Path,
) -> Result<()> {
    if let Some(labels) = sample.labels() {
        let mut out = String::from("curve_id,label\n");
        for (i, l) in labels.iter().enumerate() {
            let _ = writeln!(out, "{},{l}", i + 1);
        }
        write_file(path, &out)?;
    }
    Ok(())
}

/// Writes a sample in the requested layout; curves are written in order as
/// ids `1..=n`, and labels, when present, go to the labels sidecar.
pub fn write_sample<F: Real>(
    sample: &MultivariateFunctionalSample<F>,
    path: impl AsRef<Path>,
    format: SampleFormat,
) -> Result<()> {
    let path = path.as_ref();
    match format {
        SampleFormat::Wide => {
            std::fs::create_dir_all(path).map_err(|e| Error::io(path.display().to_string(), e))?;
            for k in 0..sample.p() {
                let mut out = String::from("curve_id");
                for t in sample.grid().points() {
                    let _ = write!(out, ",{t}");
                }
                out.push('\n');
                for i in 0..sample.n() {
                    let _ = write!(out, "{}", i + 1);
                    for v in sample.curve_dim(i, k) {
                        let _ = write!(out, ",{v}");
                    }
                    out.push('\n');
                }
                write_file(&path.join(format!("dim{}.csv", k + 1)), &out)?;
            }
            write_labels_file(sample, &path.join("labels.csv"))
        }
        SampleFormat::Long => {
            let mut out = String::from("curve_id,dim,t,value\n");
            for i in 0..sample.n() {
                for k in 0..sample.p() {
                    for (j, t) in sample.grid().points().iter().enumerate() {
                        let _ = writeln!(out, "{},{},{t},{}", i + 1, k + 1, sample.value(i, k, j));
                    }
                }
            }
            write_file(path, &out)?;
            write_labels_file(sample, &long_labels_path(path))
        }
    }
}

// ---------------------------------------------------------------------------
// results writing
// ---------------------------------------------------------------------------

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        b.report
            .rand_index
            .total_cmp(&a.report.rand_index)
            .then_with(|| a.dataset_name.cmp(&b.dataset_name))
            .then_with(|| a.method_name.cmp(&b.method_name))
    });
}

/// Writes result rows, stably sorted by Rand index (descending) with ties
/// broken by dataset then method name.
///
/// CSV columns are exactly
/// `dataset,method,purity,fmeasure,rand_index,time_seconds,replicate,seed`;
/// JSON is an array of objects with the same fields.
pub fn write_results(
    rows: &[ResultRow],
    path: impl AsRef<Path>,
    format: ResultFormat,
) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Argument("no result rows to write".into()));
    }
    let mut rows = rows.to_vec();
    sort_rows(&mut rows);
    let path = path.as_ref();
    match format {
        ResultFormat::Csv => {
            let mut out =
                String::from("dataset,method,purity,fmeasure,rand_index,time_seconds,replicate,seed\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.dataset_name,
                    r.method_name,
                    r.report.purity,
                    r.report.f_measure,
                    r.report.rand_index,
                    r.report.elapsed_seconds,
                    r.replicate,
                    r.seed
                );
            }
            write_file(path, &out)
        }
        ResultFormat::Json => {
            let items: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "dataset": r.dataset_name,
                        "method": r.method_name,
                        "purity": r.report.purity,
                        "fmeasure": r.report.f_measure,
                        "rand_index": r.report.rand_index,
                        "time_seconds": r.report.elapsed_seconds,
                        "replicate": r.replicate,
                        "seed": r.seed,
                    })
                })
                .collect();
            let text = serde_json::to_string_pretty(&items)
                .map_err(|e| Error::Format(format!("json serialization failed: {e}")))?;
            write_file(path, &(text + "\n"))
        }
    }
}

/// Writes bare cluster assignments (no evaluation), one row per curve and
/// combination. Columns: `dataset,method,curve,cluster`; curves numbered
/// from 1 in sample order.
pub fn write_partitions(
    partitions: &[(String, String, crate::fda::Partition)],
    path: impl AsRef<Path>,
) -> Result<()> {
    if partitions.is_empty() {
        return Err(Error::Argument("no partitions to write".into()));
    }
    let mut sorted: Vec<&(String, String, crate::fda::Partition)> = partitions.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut out = String::from("dataset,method,curve,cluster\n");
    for (dataset, method, partition) in sorted {
        for (i, cluster) in partition.assignment().iter().enumerate() {
            let _ = writeln!(out, "{dataset},{method},{},{cluster}", i + 1);
        }
    }
    write_file(path.as_ref(), &out)
}

/// Mean metrics of one (dataset, method) combination over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub dataset_name: String,
    pub method_name: String,
    pub purity: f64,
    pub f_measure: f64,
    pub rand_index: f64,
    pub time_seconds: f64,
    pub replicates: usize,
}

/// Writes an aggregated benchmark table (already sorted by the caller).
/// Columns: `dataset,method,purity,fmeasure,rand_index,time_seconds,replicates`.
pub fn write_aggregate(rows: &[AggregateRow], path: impl AsRef<Path>) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Argument("no aggregate rows to write".into()));
    }
    let mut out =
        String::from("dataset,method,purity,fmeasure,rand_index,time_seconds,replicates\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.dataset_name,
            r.method_name,
            r.purity,
            r.f_measure,
            r.rand_index,
            r.time_seconds,
            r.replicates
        );
    }
    write_file(path.as_ref(), &out)
}

// ---------------------------------------------------------------------------
// bundled Canadian Weather data
// ---------------------------------------------------------------------------

const WEATHER_TEMPERATURE: &str = include_str!("../data/canadian_weather/temperature.csv");
const WEATHER_PRECIPITATION: &str = include_str!("../data/canadian_weather/precipitation.csv");
const WEATHER_LABELS: &str = include_str!("../data/canadian_weather/labels.csv");

/// Region names corresponding to label ids 1..=4 in the weather data.
pub const WEATHER_REGIONS: [&str; 4] = ["Arctic", "Atlantic", "Continental", "Pacific"];

/// The bundled Canadian Weather sample: daily temperature and
/// precipitation at 35 stations averaged over 1960–1994, labeled by the
/// four climate regions. See `data/canadian_weather/README.md` for
/// provenance.
pub fn canadian_weather<F: Real>() -> Result<MultivariateFunctionalSample<F>> {
    let temp = parse_wide_dimension(WEATHER_TEMPERATURE, "bundled temperature.csv")?;
    let prec = parse_wide_dimension(WEATHER_PRECIPITATION, "bundled precipitation.csv")?;
    if temp.grid != prec.grid || temp.curve_ids != prec.curve_ids {
        return Err(Error::Format(
            "bundled weather dimensions disagree".into(),
        ));
    }
    let labels = parse_labels(WEATHER_LABELS, "bundled labels.csv")?;

    let (n, m) = (temp.curve_ids.len(), temp.grid.len());
    let mut values = Vec::with_capacity(n * 2 * m);
    for i in 0..n {
        values.extend(temp.rows[i].iter().map(|&v| F::of(v)));
        values.extend(prec.rows[i].iter().map(|&v| F::of(v)));
    }
    let label_vec: Vec<usize> = temp
        .curve_ids
        .iter()
        .map(|id| {
            labels.get(id).copied().ok_or_else(|| {
                Error::Format(format!("bundled labels.csv: no label for station '{id}'"))
            })
        })
        .collect::<Result<_>>()?;

    let grid = Grid::new(temp.grid.iter().map(|&t| F::of(t)).collect())?;
    MultivariateFunctionalSample::new(values, n, 2, grid, Some(label_vec))
}
