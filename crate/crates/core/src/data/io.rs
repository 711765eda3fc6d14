use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::matrix::{ExpressionMatrix, LabelVector};
use crate::error::{Error, Result};

/// On-disk matrix layouts.
///
/// Dense formats carry a header row (empty corner cell, then cell ids) and one
/// row per gene (gene id, then `M` values). The coordinate format starts with
/// `rows cols nnz` followed by `nnz` lines of `i j v` with 0-based indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixFormat {
    DenseCsv,
    DenseTsv,
    CooTriplets,
}

impl MatrixFormat {
    /// Guesses the format from a file extension.
    pub fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()? {
            "csv" => Some(Self::DenseCsv),
            "tsv" | "txt" => Some(Self::DenseTsv),
            "coo" | "mtx" => Some(Self::CooTriplets),
            _ => None,
        }
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<ExpressionMatrix> {
    match format {
        MatrixFormat::DenseCsv => load_dense(path, b','),
        MatrixFormat::DenseTsv => load_dense(path, b'\t'),
        MatrixFormat::CooTriplets => load_coo(path),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Open {
        path: path.to_owned(),
        source,
    })
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn load_dense(path: &Path, delimiter: u8) -> Result<ExpressionMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(delimiter)
        .flexible(true)
        .from_reader(open(path)?);
    let mut records = reader.records();

    let header = match records.next() {
        Some(r) => r.map_err(|e| parse_err(path, 1, e.to_string()))?,
        None => return Err(parse_err(path, 1, "empty file")),
    };
    let cell_ids: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let m = cell_ids.len();

    let mut gene_ids = Vec::new();
    let mut data = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() == 1 && record[0].trim().is_empty() {
            continue;
        }
        if record.len() != m + 1 {
            return Err(parse_err(
                path,
                line,
                format!("expected {} fields, found {}", m + 1, record.len()),
            ));
        }
        gene_ids.push(record[0].to_owned());
        for field in record.iter().skip(1) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| parse_err(path, line, format!("not a number: `{field}`")))?;
            data.push(v);
        }
    }
    let values = Array2::from_shape_vec((gene_ids.len(), m), data)
        .map_err(|e| Error::Shape(e.to_string()))?;
    ExpressionMatrix::new(values, gene_ids, cell_ids)
}

fn load_coo(path: &Path) -> Result<ExpressionMatrix> {
    let reader = BufReader::new(open(path)?);
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |s| !s.trim().is_empty()));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing `rows cols nnz` header"))?;
    let header = header?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(path, hline, "header must be `rows cols nnz`"))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(parse_err(path, hline, "header must be `rows cols nnz`"));
    };

    let mut values = Array2::<f64>::zeros((rows, cols));
    let mut count = 0;
    for (line, text) in lines {
        let text = text?;
        let mut it = text.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(parse_err(path, line, "expected `i j v`"));
        };
        let i: usize = i
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad row index `{i}`")))?;
        let j: usize = j
            .parse()
            .map_err(|_| parse_err(path, line, format!("bad column index `{j}`")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| parse_err(path, line, format!("not a number: `{v}`")))?;
        if i >= rows || j >= cols {
            return Err(parse_err(
                path,
                line,
                format!("index ({i}, {j}) outside declared shape {rows} x {cols}"),
            ));
        }
        // repeated coordinates accumulate
        values[[i, j]] += v;
        count += 1;
    }
    if count != nnz {
        return Err(parse_err(
            path,
            hline,
            format!("header declares {nnz} entries, found {count}"),
        ));
    }
    ExpressionMatrix::from_values(values)
}

/// Reads one label per non-empty line.
pub fn load_labels(path: &Path) -> Result<LabelVector> {
    let reader = BufReader::new(open(path)?);
    let mut labels = Vec::new();
    for line in reader.lines() {
        let line = line?;
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            labels.push(trimmed.to_owned());
        }
    }
    LabelVector::new(labels)
}

pub fn write_labels(path: &Path, labels: &LabelVector) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for l in labels.labels() {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(())
}

/// Writes any real matrix in the dense-csv layout.
pub fn write_dense_csv(
    path: &Path,
    values: &Array2<f64>,
    row_ids: &[String],
    col_ids: &[String],
) -> Result<()> {
    if row_ids.len() != values.nrows() || col_ids.len() != values.ncols() {
        return Err(Error::Dimension(format!(
            "{} row ids and {} column ids for a {:?} matrix",
            row_ids.len(),
            col_ids.len(),
            values.dim()
        )));
    }
    let mut w = csv::WriterBuilder::new().from_path(path)?;
    w.write_record(std::iter::once("").chain(col_ids.iter().map(String::as_str)))?;
    for (id, row) in row_ids.iter().zip(values.rows()) {
        let mut rec = Vec::with_capacity(row.len() + 1);
        rec.push(id.clone());
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the nonzero entries of a matrix as coordinate triplets.
pub fn write_coo(path: &Path, values: &Array2<f64>) -> Result<()> {
    let (rows, cols) = values.dim();
    let nnz = values.iter().filter(|v| **v != 0.0).count();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{rows} {cols} {nnz}")?;
    for ((i, j), &v) in values.indexed_iter() {
        if v != 0.0 {
            writeln!(out, "{i} {j} {v}")?;
        }
    }
    out.flush()?;
    Ok(())
}
