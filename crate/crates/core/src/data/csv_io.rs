use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use super::{DataError, Dataset};

/// Header plus numeric rows of a CSV file, with no label semantics attached.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<String>,
    /// Row-major values, `columns.len()` per row.
    pub values: Vec<f64>,
    pub n_rows: usize,
}

fn open(path: &Path) -> Result<csv::Reader<File>, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file))
}

fn csv_error(err: csv::Error, row: usize) -> DataError {
    DataError::Csv {
        row,
        message: err.to_string(),
    }
}

fn parse_number(cell: &str, row: usize, column: &str) -> Result<f64, DataError> {
    let v: f64 = cell.parse().map_err(|_| DataError::NonNumeric {
        row,
        column: column.to_string(),
        value: cell.to_string(),
    })?;
    if !v.is_finite() {
        return Err(DataError::NonFinite {
            row,
            column: column.to_string(),
        });
    }
    Ok(v)
}

/// Reads a purely numeric CSV. Zero data rows is allowed.
///
/// Rows are numbered from 1 for the first data row (the header is row 0).
pub fn read_feature_table(path: impl AsRef<Path>) -> Result<FeatureTable, DataError> {
    let mut reader = open(path.as_ref())?;
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(e, 0))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut values = Vec::new();
    let mut n_rows = 0;
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(e, row))?;
        if record.len() != columns.len() {
            return Err(DataError::Ragged {
                row,
                expected: columns.len(),
                found: record.len(),
            });
        }
        for (cell, name) in record.iter().zip(&columns) {
            values.push(parse_number(cell, row, name)?);
        }
        n_rows += 1;
    }
    Ok(FeatureTable {
        columns,
        values,
        n_rows,
    })
}

/// Loads a labelled dataset from CSV.
///
/// Every column except `label_column` is a feature. Labels may be integers or
/// class-name strings; if every label parses as an integer, classes are
/// ordered numerically, otherwise by first appearance.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, DataError> {
    let mut reader = open(path.as_ref())?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(e, 0))?
        .iter()
        .map(str::to_string)
        .collect();
    let label_pos = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_string()))?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_pos)
        .map(|(_, h)| h.clone())
        .collect();

    let mut features = Vec::new();
    let mut raw_labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| csv_error(e, row))?;
        if record.len() != header.len() {
            return Err(DataError::Ragged {
                row,
                expected: header.len(),
                found: record.len(),
            });
        }
        for (j, cell) in record.iter().enumerate() {
            if j == label_pos {
                if cell.is_empty() {
                    return Err(DataError::NonNumeric {
                        row,
                        column: label_column.to_string(),
                        value: String::new(),
                    });
                }
                raw_labels.push(cell.to_string());
            } else {
                features.push(parse_number(cell, row, &header[j])?);
            }
        }
    }
    if raw_labels.is_empty() {
        return Err(DataError::Empty);
    }

    let (labels, class_names) = intern_labels(&raw_labels);
    Dataset::new(features, labels, feature_names, class_names)
}

fn intern_labels(raw: &[String]) -> (Vec<usize>, Vec<String>) {
    let numeric: Option<Vec<i64>> = raw.iter().map(|s| s.parse::<i64>().ok()).collect();
    let mut class_names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    match numeric {
        Some(values) => {
            let mut distinct = values.clone();
            distinct.sort_unstable();
            distinct.dedup();
            let position: HashMap<i64, usize> =
                distinct.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            class_names = distinct.iter().map(i64::to_string).collect();
            (values.iter().map(|v| position[v]).collect(), class_names)
        }
        None => {
            let labels = raw
                .iter()
                .map(|s| {
                    *index.entry(s.clone()).or_insert_with(|| {
                        class_names.push(s.clone());
                        class_names.len() - 1
                    })
                })
                .collect();
            (labels, class_names)
        }
    }
}

/// Writes a dataset back out as CSV with the label column last.
pub fn write_csv(
    dataset: &Dataset,
    path: impl AsRef<Path>,
    label_column: &str,
) -> Result<(), DataError> {
    let path = path.as_ref();
    let io_err = |e: csv::Error| DataError::Csv {
        row: 0,
        message: format!("{}: {e}", path.display()),
    };
    let mut writer = csv::Writer::from_path(path).map_err(io_err)?;
    let mut header: Vec<&str> = dataset.feature_names().iter().map(String::as_str).collect();
    header.push(label_column);
    writer.write_record(&header).map_err(io_err)?;
    for i in 0..dataset.n_rows() {
        let mut record: Vec<String> = dataset.row(i).iter().map(|v| v.to_string()).collect();
        record.push(dataset.class_names()[dataset.labels()[i]].clone());
        writer.write_record(&record).map_err(io_err)?;
    }
    writer.flush().map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })
}
