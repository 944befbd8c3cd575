//! K-nearest-neighbor classifier on Euclidean distance with majority voting.

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KnnModel {
    x: Array2<f64>,
    y: Vec<usize>,
    k_neighbors: usize,
    n_classes: usize,
}

/// Stores the training set. `k_neighbors` must not exceed the row count.
pub fn train_knn(
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    k_neighbors: usize,
) -> Result<KnnModel> {
    let r = x.nrows();
    if r == 0 || y.len() != r {
        return Err(Error::Dataset(format!(
            "feature rows ({r}) and labels ({}) must be non-empty and match",
            y.len()
        )));
    }
    if k_neighbors < 1 || k_neighbors > r {
        return Err(Error::invalid_param(
            "k_neighbors",
            format!("need 1 <= k_neighbors <= {r}, got {k_neighbors}"),
        ));
    }
    if let Some(&bad) = y.iter().find(|&&label| label >= n_classes) {
        return Err(Error::Dataset(format!(
            "label {bad} out of range 0..{n_classes}"
        )));
    }
    Ok(KnnModel {
        x: x.to_owned(),
        y: y.to_vec(),
        k_neighbors,
        n_classes,
    })
}

impl KnnModel {
    fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let mut by_distance: Vec<(f64, usize)> = self
            .x
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, train_row)| {
                let d2: f64 = train_row
                    .iter()
                    .zip(row.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, i)
            })
            .collect();
        // Stable order: by distance, then by training index.
        by_distance.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        let neighbors = &by_distance[..self.k_neighbors];

        let mut votes = vec![0usize; self.n_classes];
        for &(_, i) in neighbors {
            votes[self.y[i]] += 1;
        }
        let top = *votes.iter().max().unwrap();
        // Vote ties go to the tied class owning the closest neighbor.
        neighbors
            .iter()
            .map(|&(_, i)| self.y[i])
            .find(|&class| votes[class] == top)
            .unwrap()
    }

    pub fn predict(&self, rows: ArrayView2<f64>) -> Vec<usize> {
        rows.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }
}
