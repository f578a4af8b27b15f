//! On-disk formats: pairwise surveys, recourse surveys, strength/cost vectors
//! and experiment reports, each as CSV or as a JSON array mirror.
//!
//! CSV headers are fixed; anything else is rejected with the offending line.
//! Floats are written with Rust's shortest round-trip representation.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use clap::ValueEnum;
use recourse_cost::{
    ComparisonDataset, ExperimentRow, FeatureCatalog, Recourse, RecourseComparison,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const PAIRWISE_HEADER: &[&str] = &["winner", "loser", "weight"];
pub const RECOURSE_HEADER: &[&str] = &["winner_set", "loser_set"];
pub const VECTOR_HEADER: &[&str] = &["feature", "value"];
pub const EXPERIMENT_HEADER: &[&str] = &[
    "trial",
    "num_features",
    "recourse_size",
    "total_comparisons",
    "comparisons_per_feature",
    "mse",
    "runtime_ms",
    "converged",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    /// `.json` files are JSON, everything else CSV.
    pub fn of_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line 1: expected header `{expected}`, found `{found}`")]
    Header { expected: String, found: String },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

type Result<T> = std::result::Result<T, FormatError>;

fn row_err(line: u64, message: impl fmt::Display) -> FormatError {
    FormatError::Row {
        line,
        message: message.to_string(),
    }
}

/// Parsed CSV body: `(line number, fields)` for each data row.
fn read_csv(bytes: &[u8], header: &[&str]) -> Result<Vec<(u64, Vec<String>)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut rows = Vec::new();
    let mut seen_header = false;
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            row_err(line, e)
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if !seen_header {
            if rec.iter().ne(header.iter().copied()) {
                return Err(FormatError::Header {
                    expected: header.join(","),
                    found: rec.iter().collect::<Vec<_>>().join(","),
                });
            }
            seen_header = true;
            continue;
        }
        if rec.len() != header.len() {
            return Err(row_err(
                line,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        rows.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(rows)
}

fn write_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    // writing into a Vec cannot fail
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn parse_f64(line: u64, field: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| row_err(line, format!("{field} `{s}` is not a number")))?;
    if !v.is_finite() {
        return Err(row_err(line, format!("{field} `{s}` is not finite")));
    }
    Ok(v)
}

fn parse_usize(line: u64, field: &str, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| row_err(line, format!("{field} `{s}` is not a non-negative integer")))
}

/// Features in order of first appearance.
fn infer_catalog<'a>(names: impl IntoIterator<Item = &'a str>) -> Result<Arc<FeatureCatalog>> {
    let mut seen: Vec<&str> = Vec::new();
    for n in names {
        if !seen.contains(&n) {
            seen.push(n);
        }
    }
    FeatureCatalog::new(seen.iter().copied())
        .map(Arc::new)
        .map_err(|e| FormatError::Invalid(format!("cannot infer feature catalog: {e}")))
}

// ---------------------------------------------------------------- pairwise

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairwiseJson {
    winner: String,
    loser: String,
    weight: f64,
}

pub fn write_pairwise(dataset: &ComparisonDataset, format: Format) -> Vec<u8> {
    let cat = dataset.catalog();
    let recs = dataset.records().iter();
    match format {
        Format::Csv => write_csv(
            PAIRWISE_HEADER,
            recs.map(|r| {
                vec![
                    cat.name(r.winner()).to_owned(),
                    cat.name(r.loser()).to_owned(),
                    r.weight().to_string(),
                ]
            }),
        ),
        Format::Json => to_json(
            &recs
                .map(|r| PairwiseJson {
                    winner: cat.name(r.winner()).to_owned(),
                    loser: cat.name(r.loser()).to_owned(),
                    weight: r.weight(),
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Reads a pairwise survey. Without `catalog`, features are catalogued in
/// order of first appearance.
pub fn read_pairwise(
    bytes: &[u8],
    format: Format,
    catalog: Option<Arc<FeatureCatalog>>,
) -> Result<ComparisonDataset> {
    let rows: Vec<(u64, String, String, String)> = match format {
        Format::Csv => read_csv(bytes, PAIRWISE_HEADER)?
            .into_iter()
            .map(|(line, mut f)| {
                let weight = f.pop().unwrap();
                let loser = f.pop().unwrap();
                let winner = f.pop().unwrap();
                (line, winner, loser, weight)
            })
            .collect(),
        Format::Json => from_json::<PairwiseJson>(bytes)?
            .into_iter()
            .enumerate()
            .map(|(i, r)| (i as u64 + 1, r.winner, r.loser, r.weight.to_string()))
            .collect(),
    };
    let catalog = match catalog {
        Some(c) => c,
        None => infer_catalog(
            rows.iter()
                .flat_map(|(_, w, l, _)| [w.as_str(), l.as_str()]),
        )?,
    };
    let mut ds = ComparisonDataset::new(catalog);
    for (line, winner, loser, weight) in &rows {
        let weight = parse_f64(*line, "weight", weight)?;
        ds.push_named(winner, loser, weight)
            .map_err(|e| row_err(*line, e))?;
    }
    Ok(ds)
}

// ---------------------------------------------------------------- recourse

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecourseJson {
    winner_set: Vec<String>,
    loser_set: Vec<String>,
}

fn names_of(r: &Recourse, cat: &FeatureCatalog) -> Vec<String> {
    r.members()
        .iter()
        .map(|&i| cat.name(i).to_owned())
        .collect()
}

pub fn write_recourse(
    records: &[RecourseComparison],
    catalog: &FeatureCatalog,
    format: Format,
) -> Vec<u8> {
    match format {
        Format::Csv => write_csv(
            RECOURSE_HEADER,
            records
                .iter()
                .map(|r| vec![r.winner().label(catalog), r.loser().label(catalog)]),
        ),
        Format::Json => to_json(
            &records
                .iter()
                .map(|r| RecourseJson {
                    winner_set: names_of(r.winner(), catalog),
                    loser_set: names_of(r.loser(), catalog),
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Splits a `;`-separated recourse cell.
pub fn split_set(cell: &str) -> Vec<&str> {
    cell.split(';').collect()
}

pub fn read_recourse(
    bytes: &[u8],
    format: Format,
    catalog: Option<Arc<FeatureCatalog>>,
) -> Result<(Arc<FeatureCatalog>, Vec<RecourseComparison>)> {
    let rows: Vec<(u64, Vec<String>, Vec<String>)> = match format {
        Format::Csv => read_csv(bytes, RECOURSE_HEADER)?
            .into_iter()
            .map(|(line, f)| {
                let split = |s: &str| split_set(s).into_iter().map(str::to_owned).collect();
                (line, split(&f[0]), split(&f[1]))
            })
            .collect(),
        Format::Json => from_json::<RecourseJson>(bytes)?
            .into_iter()
            .enumerate()
            .map(|(i, r)| (i as u64 + 1, r.winner_set, r.loser_set))
            .collect(),
    };
    let catalog = match catalog {
        Some(c) => c,
        None => infer_catalog(
            rows.iter()
                .flat_map(|(_, w, l)| w.iter().chain(l.iter()).map(String::as_str)),
        )?,
    };
    let mut out = Vec::with_capacity(rows.len());
    for (line, winner, loser) in &rows {
        let w = catalog.recourse(winner).map_err(|e| row_err(*line, e))?;
        let l = catalog.recourse(loser).map_err(|e| row_err(*line, e))?;
        out.push(RecourseComparison::new(w, l).map_err(|e| row_err(*line, e))?);
    }
    Ok((catalog, out))
}

// ---------------------------------------------------------------- vectors

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorJson {
    feature: String,
    value: f64,
}

/// `feature,value` table for strengths or costs.
pub fn write_vector(catalog: &FeatureCatalog, values: &[f64], format: Format) -> Vec<u8> {
    let pairs = catalog.names().iter().zip(values);
    match format {
        Format::Csv => write_csv(
            VECTOR_HEADER,
            pairs.map(|(n, v)| vec![n.clone(), v.to_string()]),
        ),
        Format::Json => to_json(
            &pairs
                .map(|(n, &v)| VectorJson {
                    feature: n.clone(),
                    value: v,
                })
                .collect::<Vec<_>>(),
        ),
    }
}

/// Reads a `feature,value` table; the file's row order defines the catalog.
pub fn read_vector(bytes: &[u8], format: Format) -> Result<(Arc<FeatureCatalog>, Vec<f64>)> {
    let rows: Vec<(u64, String, f64)> = match format {
        Format::Csv => read_csv(bytes, VECTOR_HEADER)?
            .into_iter()
            .map(|(line, f)| Ok((line, f[0].clone(), parse_f64(line, "value", &f[1])?)))
            .collect::<Result<_>>()?,
        Format::Json => from_json::<VectorJson>(bytes)?
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                let line = i as u64 + 1;
                Ok((
                    line,
                    r.feature,
                    parse_f64(line, "value", &r.value.to_string())?,
                ))
            })
            .collect::<Result<_>>()?,
    };
    let catalog = FeatureCatalog::new(rows.iter().map(|(_, n, _)| n.clone()))
        .map_err(|e| FormatError::Invalid(format!("invalid feature list: {e}")))?;
    Ok((
        Arc::new(catalog),
        rows.into_iter().map(|(_, _, v)| v).collect(),
    ))
}

// ---------------------------------------------------------------- experiments

pub fn write_experiment(rows: &[ExperimentRow], format: Format) -> Vec<u8> {
    match format {
        Format::Csv => write_csv(
            EXPERIMENT_HEADER,
            rows.iter().map(|r| {
                vec![
                    r.trial.to_string(),
                    r.num_features.to_string(),
                    r.recourse_size.to_string(),
                    r.total_comparisons.to_string(),
                    r.comparisons_per_feature.to_string(),
                    r.mse.to_string(),
                    r.runtime_ms.to_string(),
                    r.converged.to_string(),
                ]
            }),
        ),
        Format::Json => to_json(rows),
    }
}

pub fn read_experiment(bytes: &[u8], format: Format) -> Result<Vec<ExperimentRow>> {
    match format {
        Format::Csv => read_csv(bytes, EXPERIMENT_HEADER)?
            .into_iter()
            .map(|(line, f)| {
                let converged = match f[7].as_str() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(row_err(
                            line,
                            format!("converged `{other}` is not true/false"),
                        ))
                    }
                };
                Ok(ExperimentRow {
                    trial: parse_usize(line, "trial", &f[0])?,
                    num_features: parse_usize(line, "num_features", &f[1])?,
                    recourse_size: parse_usize(line, "recourse_size", &f[2])?,
                    total_comparisons: parse_usize(line, "total_comparisons", &f[3])?,
                    comparisons_per_feature: parse_f64(line, "comparisons_per_feature", &f[4])?,
                    mse: parse_f64(line, "mse", &f[5])?,
                    runtime_ms: parse_f64(line, "runtime_ms", &f[6])?,
                    converged,
                })
            })
            .collect(),
        Format::Json => {
            let rows: Vec<ExperimentRow> = serde_json::from_slice(bytes)?;
            Ok(rows)
        }
    }
}

// ---------------------------------------------------------------- helpers

fn to_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("plain data serializes");
    out.push(b'\n');
    out
}

fn from_json<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<Vec<T>> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(Vec::new());
    }
    Ok(serde_json::from_slice(bytes)?)
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |source| FormatError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}
