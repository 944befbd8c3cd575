//! Feature standardization, multiclass classifiers, stratified
//! cross-validation, and F1 / confusion-matrix scoring.

pub mod knn;
pub mod metrics;
pub mod svm;

pub use knn::{train_knn, KnnModel};
pub use metrics::{confusion_matrix, macro_f1, per_class_f1, weighted_f1};
pub use svm::{train_linear_svm, LinearSvm};

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

/// Feature matrix plus class labels; the classification stage's input.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn new(
        features: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<LabeledDataset> {
        if features.nrows() != labels.len() {
            return Err(Error::Dataset(format!(
                "{} feature rows vs {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(Error::Dataset(format!(
                "label {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Dataset("non-finite feature value".to_string()));
        }
        Ok(LabeledDataset {
            features,
            labels,
            class_names,
        })
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Column transforms applied when assembling graph features into a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeaturePrep {
    /// log1p the count-scale columns (node count, edge count, max degree,
    /// triangle count), which span several orders of magnitude across
    /// classes.
    pub log1p_counts: bool,
    /// Drop the node- and edge-count columns entirely.
    pub drop_count_columns: bool,
}

impl Default for FeaturePrep {
    fn default() -> Self {
        FeaturePrep {
            log1p_counts: true,
            drop_count_columns: false,
        }
    }
}

/// Positions of count-scale columns in [`FeatureVector::to_array`] order.
const COUNT_COLUMNS: [usize; 4] = [0, 1, 3, 7];

/// Builds a dataset from per-graph feature vectors.
pub fn prepare_dataset(
    features: &[FeatureVector],
    labels: Vec<usize>,
    class_names: Vec<String>,
    prep: FeaturePrep,
) -> Result<LabeledDataset> {
    let rows: Vec<[f64; FeatureVector::LEN]> = features
        .iter()
        .map(|f| {
            let mut row = f.to_array();
            if prep.log1p_counts {
                for &col in &COUNT_COLUMNS {
                    row[col] = row[col].ln_1p();
                }
            }
            row
        })
        .collect();
    let keep: Vec<usize> = (0..FeatureVector::LEN)
        .filter(|col| !(prep.drop_count_columns && (*col == 0 || *col == 1)))
        .collect();
    let mut matrix = Array2::zeros((rows.len(), keep.len()));
    for (r, row) in rows.iter().enumerate() {
        for (c, &col) in keep.iter().enumerate() {
            matrix[(r, c)] = row[col];
        }
    }
    LabeledDataset::new(matrix, labels, class_names)
}

/// Per-column z-score parameters, fit on training rows only. Columns with
/// zero variance are flagged and passed through unscaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationParams {
    pub mean: Vec<f64>,
    /// Population (divide-by-r) standard deviation per column.
    pub std: Vec<f64>,
    pub constant: Vec<bool>,
}

pub fn standardize_fit(rows: ArrayView2<f64>) -> Result<StandardizationParams> {
    let r = rows.nrows();
    if r == 0 {
        return Err(Error::Dataset("standardization needs training rows".into()));
    }
    let mean: Vec<f64> = rows.mean_axis(Axis(0)).unwrap().to_vec();
    let mut std = Vec::with_capacity(rows.ncols());
    let mut constant = Vec::with_capacity(rows.ncols());
    for (c, &m) in mean.iter().enumerate() {
        let var = rows.column(c).iter().map(|v| (v - m) * (v - m)).sum::<f64>() / r as f64;
        let sigma = var.sqrt();
        constant.push(sigma == 0.0);
        std.push(sigma);
    }
    Ok(StandardizationParams {
        mean,
        std,
        constant,
    })
}

pub fn standardize_apply(params: &StandardizationParams, rows: ArrayView2<f64>) -> Array2<f64> {
    let mut out = rows.to_owned();
    for (c, ((&m, &s), &is_const)) in params
        .mean
        .iter()
        .zip(&params.std)
        .zip(&params.constant)
        .enumerate()
    {
        if is_const {
            continue;
        }
        for v in out.column_mut(c).iter_mut() {
            *v = (*v - m) / s;
        }
    }
    out
}

/// Stratified fold assignment: per-class seeded shuffle, then round-robin
/// over folds, which keeps every fold's class counts within one of size/k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldAssignment {
    /// Fold index per row.
    pub folds: Vec<usize>,
    /// Effective fold count (reduced when the smallest class has fewer than
    /// the requested k members).
    pub k: usize,
    pub reduced: bool,
}

pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::invalid_param("k", format!("need k >= 2, got {k}")));
    }
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (row, &label) in labels.iter().enumerate() {
        per_class[label].push(row);
    }
    let min_class = per_class
        .iter()
        .filter(|members| !members.is_empty())
        .map(|members| members.len())
        .min()
        .unwrap_or(0);
    let k_eff = k.min(min_class);
    if k_eff < 2 {
        return Err(Error::Dataset(format!(
            "smallest class has {min_class} members; cannot stratify into >= 2 folds"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![0usize; labels.len()];
    for members in per_class.iter_mut() {
        members.shuffle(&mut rng);
        for (i, &row) in members.iter().enumerate() {
            folds[row] = i % k_eff;
        }
    }
    Ok(FoldAssignment {
        folds,
        k: k_eff,
        reduced: k_eff < k,
    })
}

/// Which classifier a benchmark cell trains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClassifierSpec {
    Svm { c: f64, epochs: usize },
    Knn { k_neighbors: usize },
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Svm {
            c: 1.0,
            epochs: 200,
        }
    }
}

impl ClassifierSpec {
    fn fit_predict(
        &self,
        train_x: ArrayView2<f64>,
        train_y: &[usize],
        test_x: ArrayView2<f64>,
        n_classes: usize,
        seed: u64,
    ) -> Result<Vec<usize>> {
        match *self {
            ClassifierSpec::Svm { c, epochs } => {
                let model = train_linear_svm(train_x, train_y, n_classes, c, epochs, seed)?;
                Ok(model.predict(test_x))
            }
            ClassifierSpec::Knn { k_neighbors } => {
                let model = train_knn(train_x, train_y, n_classes, k_neighbors.min(train_y.len()))?;
                Ok(model.predict(test_x))
            }
        }
    }
}

/// Cross-validation outcome: per-fold scores, their mean, and the confusion
/// matrix summed over fold test sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVReport {
    pub per_fold_f1: Vec<f64>,
    pub mean_f1: f64,
    pub per_fold_f1_weighted: Vec<f64>,
    pub mean_f1_weighted: f64,
    /// Per-class F1 computed from the summed confusion matrix.
    pub per_class_f1: Vec<f64>,
    pub confusion: Vec<Vec<usize>>,
    pub fold_assignments: Vec<usize>,
    pub folds: usize,
    pub seed: u64,
}

impl CVReport {
    /// CSV of per-fold scores: `fold,macro_f1,weighted_f1`.
    pub fn per_fold_csv(&self) -> String {
        let mut out = String::from("fold,macro_f1,weighted_f1\n");
        for (fold, (macro_f1, weighted)) in self
            .per_fold_f1
            .iter()
            .zip(&self.per_fold_f1_weighted)
            .enumerate()
        {
            out.push_str(&format!("{fold},{macro_f1},{weighted}\n"));
        }
        out
    }

    /// CSV of the summed confusion matrix with class-name headers.
    pub fn confusion_csv(&self, class_names: &[String]) -> String {
        let mut out = String::from("class");
        for name in class_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (row, counts) in self.confusion.iter().enumerate() {
            out.push_str(&class_names[row]);
            for count in counts {
                out.push_str(&format!(",{count}"));
            }
            out.push('\n');
        }
        out
    }
}

use crate::seedmix::derive_seed;

/// Stratified k-fold cross-validation: per fold, standardization is fit on
/// the training rows only, both splits transformed, the classifier trained
/// and scored on the held-out fold.
pub fn cross_validate(
    dataset: &LabeledDataset,
    spec: &ClassifierSpec,
    k: usize,
    seed: u64,
) -> Result<CVReport> {
    let assignment = stratified_kfold(dataset.labels(), k, seed)?;
    let n_classes = dataset.n_classes();
    let mut per_fold_f1 = Vec::with_capacity(assignment.k);
    let mut per_fold_f1_weighted = Vec::with_capacity(assignment.k);
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];

    for fold in 0..assignment.k {
        let (train_rows, test_rows): (Vec<usize>, Vec<usize>) =
            (0..dataset.n_rows()).partition(|&row| assignment.folds[row] != fold);
        let evaluation = evaluate_split(
            dataset,
            spec,
            &train_rows,
            &test_rows,
            derive_seed(seed, fold as u64),
        )?;
        per_fold_f1.push(evaluation.f1);
        per_fold_f1_weighted.push(evaluation.f1_weighted);
        for (c_row, counts) in evaluation.confusion.iter().enumerate() {
            for (c_col, &count) in counts.iter().enumerate() {
                confusion[c_row][c_col] += count;
            }
        }
    }

    let mean = |values: &[f64]| values.iter().sum::<f64>() / values.len() as f64;
    Ok(CVReport {
        mean_f1: mean(&per_fold_f1),
        mean_f1_weighted: mean(&per_fold_f1_weighted),
        per_class_f1: per_class_f1(&confusion),
        per_fold_f1,
        per_fold_f1_weighted,
        confusion,
        fold_assignments: assignment.folds,
        folds: assignment.k,
        seed,
    })
}

/// Single stratified train/test split. `test_fraction` is realized as fold 0
/// of a stratified round(1/fraction)-fold assignment, so a 0.2 fraction
/// matches fold 0 of 5-fold cross-validation under the same seed.
pub fn holdout_evaluate(
    dataset: &LabeledDataset,
    spec: &ClassifierSpec,
    test_fraction: f64,
    seed: u64,
) -> Result<HoldoutReport> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::invalid_param(
            "test_fraction",
            format!("need 0 < fraction < 1, got {test_fraction}"),
        ));
    }
    let k = (1.0 / test_fraction).round().max(2.0) as usize;
    let assignment = stratified_kfold(dataset.labels(), k, seed)?;
    let (train_rows, test_rows): (Vec<usize>, Vec<usize>) =
        (0..dataset.n_rows()).partition(|&row| assignment.folds[row] != 0);
    let evaluation = evaluate_split(dataset, spec, &train_rows, &test_rows, derive_seed(seed, 0))?;
    Ok(HoldoutReport {
        f1: evaluation.f1,
        f1_weighted: evaluation.f1_weighted,
        confusion: evaluation.confusion,
        test_rows: test_rows.len(),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoldoutReport {
    pub f1: f64,
    pub f1_weighted: f64,
    pub confusion: Vec<Vec<usize>>,
    pub test_rows: usize,
    pub seed: u64,
}

struct SplitEvaluation {
    f1: f64,
    f1_weighted: f64,
    confusion: Vec<Vec<usize>>,
}

fn evaluate_split(
    dataset: &LabeledDataset,
    spec: &ClassifierSpec,
    train_rows: &[usize],
    test_rows: &[usize],
    train_seed: u64,
) -> Result<SplitEvaluation> {
    if train_rows.is_empty() || test_rows.is_empty() {
        return Err(Error::Dataset(
            "split left an empty train or test set".to_string(),
        ));
    }
    let select = |rows: &[usize]| dataset.features().select(Axis(0), rows);
    let train_x_raw = select(train_rows);
    let test_x_raw = select(test_rows);
    let train_y: Vec<usize> = train_rows.iter().map(|&r| dataset.labels()[r]).collect();
    let test_y: Vec<usize> = test_rows.iter().map(|&r| dataset.labels()[r]).collect();

    let params = standardize_fit(train_x_raw.view())?;
    let train_x = standardize_apply(&params, train_x_raw.view());
    let test_x = standardize_apply(&params, test_x_raw.view());

    let n_classes = dataset.n_classes();
    let predictions =
        spec.fit_predict(train_x.view(), &train_y, test_x.view(), n_classes, train_seed)?;
    Ok(SplitEvaluation {
        f1: macro_f1(&test_y, &predictions, n_classes)?,
        f1_weighted: weighted_f1(&test_y, &predictions, n_classes)?,
        confusion: confusion_matrix(&test_y, &predictions, n_classes)?,
    })
}
