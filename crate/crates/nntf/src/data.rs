//! CSV ingestion and output: comma-separated, optional single header line,
//! one sample per row.

use std::path::Path;

use nalgebra::DMatrix;
use nntf_core::Sample;

use crate::error::{Error, Result};

/// Reads a rectangular numeric CSV. A first line that does not parse as
/// numbers is taken to be a header and skipped.
pub fn load_csv(path: &Path) -> Result<DMatrix<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path)
}

pub fn read_csv<R: std::io::Read>(reader: R, path: &Path) -> Result<DMatrix<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0usize;
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.position().map_or(i + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(str::parse::<f64>).collect();
        let parsed = match parsed {
            Ok(v) => v,
            Err(_) if rows == 0 && cols.is_none() => {
                // header line
                cols = Some(record.len());
                continue;
            }
            Err(e) => {
                let cell = record
                    .iter()
                    .find(|c| c.parse::<f64>().is_err())
                    .unwrap_or_default();
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("non-numeric cell `{cell}`: {e}"),
                });
            }
        };
        if let Some(bad) = parsed.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                message: format!("non-finite value {bad}"),
            });
        }
        match cols {
            Some(c) if c != parsed.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: format!("expected {c} columns, found {}", parsed.len()),
                })
            }
            _ => cols = Some(parsed.len()),
        }
        values.extend(parsed);
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if rows == 0 || cols == 0 {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "no data rows".into(),
        });
    }
    Ok(DMatrix::from_row_slice(rows, cols, &values))
}

pub fn write_csv(path: &Path, data: &DMatrix<f64>, header: Option<&[String]>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Data(e.to_string()))?;
    let to_err = |e: csv::Error| Error::Data(format!("{}: {e}", path.display()));
    if let Some(h) = header {
        w.write_record(h).map_err(to_err)?;
    }
    for row in data.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))
            .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn sample_to_matrix(sample: &Sample) -> DMatrix<f64> {
    DMatrix::from_row_slice(sample.len(), sample.dim(), sample.as_slice())
}

/// Rows of `data` as a sample; every value must lie in `[0, 1]`.
pub fn matrix_to_sample(data: &DMatrix<f64>) -> Result<Sample> {
    let mut values = Vec::with_capacity(data.len());
    for row in data.row_iter() {
        values.extend(row.iter().copied());
    }
    Ok(Sample::new(data.ncols(), values)?)
}
