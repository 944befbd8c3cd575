//! Classification scoring: confusion matrices and F1 variants.

use crate::error::{Error, Result};

fn check_lengths(y_true: &[usize], y_pred: &[usize]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    Ok(())
}

/// `confusion[i][j]` counts rows with true class i predicted as class j.
pub fn confusion_matrix(
    y_true: &[usize],
    y_pred: &[usize],
    n_classes: usize,
) -> Result<Vec<Vec<usize>>> {
    check_lengths(y_true, y_pred)?;
    let mut m = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        m[t][p] += 1;
    }
    Ok(m)
}

/// Per-class F1 = 2PR / (P + R), taken as 0 when precision and recall are
/// both 0. Classes are indexed 0..n_classes.
pub fn per_class_f1(confusion: &[Vec<usize>]) -> Vec<f64> {
    let n_classes = confusion.len();
    (0..n_classes)
        .map(|c| {
            let tp = confusion[c][c] as f64;
            let fp: f64 = (0..n_classes)
                .filter(|&i| i != c)
                .map(|i| confusion[i][c] as f64)
                .sum();
            let fn_: f64 = (0..n_classes)
                .filter(|&j| j != c)
                .map(|j| confusion[c][j] as f64)
                .sum();
            let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
            if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            }
        })
        .collect()
}

/// Unweighted mean of per-class F1 over the classes present in `y_true`.
pub fn macro_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    let confusion = confusion_matrix(y_true, y_pred, n_classes)?;
    let f1 = per_class_f1(&confusion);
    let mut sum = 0.0;
    let mut present = 0usize;
    for c in 0..n_classes {
        let support: usize = confusion[c].iter().sum();
        if support > 0 {
            sum += f1[c];
            present += 1;
        }
    }
    Ok(if present == 0 { 0.0 } else { sum / present as f64 })
}

/// Support-weighted mean of per-class F1.
pub fn weighted_f1(y_true: &[usize], y_pred: &[usize], n_classes: usize) -> Result<f64> {
    let confusion = confusion_matrix(y_true, y_pred, n_classes)?;
    let f1 = per_class_f1(&confusion);
    let mut sum = 0.0;
    let mut total = 0usize;
    for c in 0..n_classes {
        let support: usize = confusion[c].iter().sum();
        sum += f1[c] * support as f64;
        total += support;
    }
    Ok(if total == 0 { 0.0 } else { sum / total as f64 })
}
