//! Loader for labeled feature tables: CSV with a header row, one `class`
//! column carrying string labels, and numeric feature columns elsewhere.

use std::path::Path;

use ndarray::Array2;

use lownet::classify::LabeledDataset;
use lownet::{Error, Result};

pub fn load_labeled_csv(path: &Path) -> Result<LabeledDataset> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| Error::EmptyFile {
            path: path.to_path_buf(),
        })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let class_col = columns
        .iter()
        .position(|c| c.eq_ignore_ascii_case("class"))
        .ok_or_else(|| parse_err(header_no + 1, "header has no `class` column".to_string()))?;
    let feature_cols: Vec<usize> = (0..columns.len()).filter(|&c| c != class_col).collect();
    if feature_cols.is_empty() {
        return Err(parse_err(header_no + 1, "no feature columns".to_string()));
    }

    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut rows = 0usize;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(parse_err(
                line_no,
                format!("expected {} fields, got {}", columns.len(), fields.len()),
            ));
        }
        let class_name = fields[class_col];
        let label = match class_names.iter().position(|c| c == class_name) {
            Some(label) => label,
            None => {
                class_names.push(class_name.to_string());
                class_names.len() - 1
            }
        };
        labels.push(label);
        for &col in &feature_cols {
            let value: f64 = fields[col].parse().map_err(|_| {
                parse_err(
                    line_no,
                    format!("column `{}`: `{}` is not a number", columns[col], fields[col]),
                )
            })?;
            values.push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    let features = Array2::from_shape_vec((rows, feature_cols.len()), values)
        .expect("row-major feature buffer matches dimensions");
    LabeledDataset::new(features, labels, class_names)
}
