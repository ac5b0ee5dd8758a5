//! CSV reading and writing of datasets and weight files.

use std::collections::BTreeMap;
use std::path::Path;

use fairweight_core::data::{Column, ColumnarDataset, RawColumn};
use fairweight_core::graph::{CausalGraph, NodeKind};
use serde::{Deserialize, Serialize};

use crate::error::{write, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Continuous,
    Categorical,
}

/// Column name → kind. Columns of the file that are not listed are skipped.
pub type Schema = BTreeMap<String, ColumnKind>;

pub fn schema_from_graph(g: &CausalGraph) -> Schema {
    g.nodes()
        .iter()
        .map(|n| {
            let kind = match n.kind {
                NodeKind::Continuous => ColumnKind::Continuous,
                NodeKind::Categorical { .. } => ColumnKind::Categorical,
            };
            (n.name.clone(), kind)
        })
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            _ => unreachable!(),
        },
        _ => Error::Data(format!("{}: {e}", path.display())),
    }
}

/// Read a headed RFC 4180 CSV. Columns keep file order; empty cells are
/// rejected. Row numbers in messages count data rows from 1.
pub fn load_csv(path: &Path, schema: &Schema) -> Result<ColumnarDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    for name in schema.keys() {
        if !header.iter().any(|h| h == name) {
            return Err(Error::Data(format!("{}: header has no column `{name}`", path.display())));
        }
    }
    let picked: Vec<(usize, &str, ColumnKind)> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| schema.get(h).map(|k| (i, h, *k)))
        .collect();
    let mut continuous: Vec<Vec<f64>> = vec![Vec::new(); picked.len()];
    let mut categorical: Vec<Vec<String>> = vec![Vec::new(); picked.len()];
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let row = r + 1;
        for (j, &(i, name, kind)) in picked.iter().enumerate() {
            let cell = record.get(i).unwrap_or("").trim();
            if cell.is_empty() {
                return Err(Error::Data(format!("{}: row {row}, column `{name}`: missing value", path.display())));
            }
            match kind {
                ColumnKind::Continuous => {
                    let v: f64 = cell.parse().map_err(|_| {
                        Error::Data(format!("{}: row {row}, column `{name}`: cannot parse `{cell}` as a number", path.display()))
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Data(format!("{}: row {row}, column `{name}`: value is not finite", path.display())));
                    }
                    continuous[j].push(v);
                }
                ColumnKind::Categorical => categorical[j].push(cell.to_string()),
            }
        }
    }
    let columns = picked
        .iter()
        .enumerate()
        .map(|(j, &(_, name, kind))| Column {
            name: name.to_string(),
            values: match kind {
                ColumnKind::Continuous => RawColumn::Continuous(std::mem::take(&mut continuous[j])),
                ColumnKind::Categorical => RawColumn::Categorical(std::mem::take(&mut categorical[j])),
            },
        })
        .collect();
    Ok(ColumnarDataset::new(columns)?)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(path: &Path, w: csv::Writer<Vec<u8>>) -> Result<()> {
    let bytes = w.into_inner().map_err(|e| Error::io(path, e.into_error()))?;
    write(path, bytes)
}

/// Shortest decimal form that parses back to the same `f64`.
fn number(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_dataset(path: &Path, ds: &ColumnarDataset) -> Result<()> {
    let mut w = writer();
    let io = |e: csv::Error| Error::Data(e.to_string());
    w.write_record(ds.columns().iter().map(|c| c.name.as_str())).map_err(io)?;
    for r in 0..ds.len() {
        w.write_record(ds.columns().iter().map(|c| raw_cell(&c.values, r))).map_err(io)?;
    }
    finish(path, w)
}

fn raw_cell(values: &RawColumn, r: usize) -> String {
    match values {
        RawColumn::Continuous(v) => number(v[r]),
        RawColumn::Categorical(v) => v[r].clone(),
    }
}

/// Weight file: original row index, weight, then every raw column. Rows are
/// sorted by descending weight, ties by ascending index.
pub fn export_weights(path: &Path, ds: &ColumnarDataset, rows: &[usize], weights: &[f64]) -> Result<()> {
    if rows.len() != weights.len() {
        return Err(Error::Data(format!("{} row indices for {} weights", rows.len(), weights.len())));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]).then(rows[a].cmp(&rows[b])));
    let mut w = writer();
    let io = |e: csv::Error| Error::Data(e.to_string());
    let mut header = vec!["index".to_string(), "weight".to_string()];
    header.extend(ds.columns().iter().map(|c| c.name.clone()));
    w.write_record(&header).map_err(io)?;
    for k in order {
        let mut rec = vec![rows[k].to_string(), number(weights[k])];
        rec.extend(ds.columns().iter().map(|c| raw_cell(&c.values, rows[k])));
        w.write_record(&rec).map_err(io)?;
    }
    finish(path, w)
}

/// Read a weight file back as `(index, weight)` pairs in file order.
pub fn read_weights(path: &Path) -> Result<Vec<(usize, f64)>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let header = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data(format!("{}: weight file has no `{name}` column", path.display())))
    };
    let (ci, cw) = (col("index")?, col("weight")?);
    let mut out = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let bad = |what: &str| Error::Data(format!("{}: row {}: invalid {what}", path.display(), r + 1));
        let index = record.get(ci).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("index"))?;
        let weight: f64 = record.get(cw).and_then(|v| v.trim().parse().ok()).ok_or_else(|| bad("weight"))?;
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(bad("weight"));
        }
        out.push((index, weight));
    }
    Ok(out)
}

/// Weights for every row of an `m`-row dataset; the file must cover each
/// index exactly once.
pub fn weights_for_dataset(path: &Path, m: usize) -> Result<Vec<f64>> {
    let pairs = read_weights(path)?;
    if pairs.len() != m {
        return Err(Error::Data(format!("{}: {} weights for a dataset of {m} rows", path.display(), pairs.len())));
    }
    let mut w = vec![f64::NAN; m];
    for (i, v) in pairs {
        if i >= m || !w[i].is_nan() {
            return Err(Error::Data(format!("{}: row index {i} is out of range or repeated", path.display())));
        }
        w[i] = v;
    }
    Ok(w)
}
