use std::fs::File;
use std::io::Write;
use std::path::Path;

use super::HarnessError;
use crate::linalg::{DenseMatrix, DenseVector};

fn read_rows(path: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).flexible(true).from_path(path)?;
    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let row = rec
            .iter()
            .map(|f| {
                f.parse::<f64>().map_err(|_| {
                    HarnessError::Config(format!("{}: line {}: '{f}' is not a number", path.display(), line + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Plain CSV, one matrix row per line, no header.
pub fn read_matrix_csv(path: &Path) -> Result<DenseMatrix, HarnessError> {
    let rows = read_rows(path)?;
    DenseMatrix::from_rows(&rows).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

/// Accepts either one value per line or a single line of values.
pub fn read_vector_csv(path: &Path) -> Result<DenseVector, HarnessError> {
    let rows = read_rows(path)?;
    let values: Vec<f64> = if rows.len() == 1 {
        rows.into_iter().next().unwrap_or_default()
    } else if rows.iter().all(|r| r.len() == 1) {
        rows.into_iter().map(|r| r[0]).collect()
    } else {
        return Err(HarnessError::Config(format!("{}: expected a single row or column", path.display())));
    };
    if values.is_empty() {
        return Err(HarnessError::Config(format!("{}: empty vector", path.display())));
    }
    DenseVector::new(values).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

pub fn write_vector_csv(path: &Path, v: &[f64]) -> Result<(), HarnessError> {
    let mut f = File::create(path)?;
    for x in v {
        writeln!(f, "{x}")?;
    }
    Ok(())
}

pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<(), HarnessError> {
    let mut f = File::create(path)?;
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(f64::to_string).collect();
        writeln!(f, "{}", line.join(","))?;
    }
    Ok(())
}
