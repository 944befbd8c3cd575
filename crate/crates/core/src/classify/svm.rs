//! One-vs-rest linear SVM trained by stochastic subgradient descent on the
//! L2-regularized hinge loss.
//!
//! Pegasos-style steps: eta_t = 1/(lambda t) with lambda = 1/(C r), followed
//! by projection onto the ball of radius 1/sqrt(lambda), which is what keeps
//! the early (large) steps from blowing up the iterates. The bias rides
//! along as an augmented constant feature. After every epoch the joint
//! objective is evaluated and the best snapshot kept, so the returned model
//! never scores worse than the zero-weight baseline.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LinearSvm {
    /// One weight row per class (bias excluded).
    weights: Array2<f64>,
    biases: Vec<f64>,
    lambda: f64,
}

impl LinearSvm {
    pub fn n_classes(&self) -> usize {
        self.biases.len()
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    /// Class scores for one row.
    pub fn scores(&self, row: ArrayView1<f64>) -> Vec<f64> {
        (0..self.n_classes())
            .map(|c| self.weights.row(c).dot(&row) + self.biases[c])
            .collect()
    }

    /// Argmax class, ties resolved toward the lowest class index.
    pub fn predict_row(&self, row: ArrayView1<f64>) -> usize {
        let scores = self.scores(row);
        let mut best = 0usize;
        for (c, &s) in scores.iter().enumerate().skip(1) {
            if s > scores[best] {
                best = c;
            }
        }
        best
    }

    pub fn predict(&self, rows: ArrayView2<f64>) -> Vec<usize> {
        rows.rows().into_iter().map(|r| self.predict_row(r)).collect()
    }

    /// L2-regularized hinge objective (bias included in the norm, matching
    /// the augmented-feature training), summed over one-vs-rest problems and
    /// averaged over rows.
    pub fn objective(&self, x: ArrayView2<f64>, y: &[usize]) -> f64 {
        let r = x.nrows() as f64;
        let mut total = 0.0;
        for c in 0..self.n_classes() {
            let w = self.weights.row(c);
            let b = self.biases[c];
            let mut hinge = 0.0;
            for (row, &label) in x.rows().into_iter().zip(y) {
                let target = if label == c { 1.0 } else { -1.0 };
                hinge += (1.0 - target * (w.dot(&row) + b)).max(0.0);
            }
            total += self.lambda / 2.0 * (w.dot(&w) + b * b) + hinge / r;
        }
        total
    }
}

/// Trains a one-vs-rest linear SVM. `n_classes` fixes the output arity; `y`
/// must contain at least two distinct labels.
pub fn train_linear_svm(
    x: ArrayView2<f64>,
    y: &[usize],
    n_classes: usize,
    c: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearSvm> {
    let r = x.nrows();
    if r == 0 || y.len() != r {
        return Err(Error::Dataset(format!(
            "feature rows ({r}) and labels ({}) must be non-empty and match",
            y.len()
        )));
    }
    {
        let mut seen = vec![false; n_classes];
        for &label in y {
            if label >= n_classes {
                return Err(Error::Dataset(format!(
                    "label {label} out of range 0..{n_classes}"
                )));
            }
            seen[label] = true;
        }
        if seen.iter().filter(|&&s| s).count() < 2 {
            return Err(Error::Dataset(
                "training data carries a single class".to_string(),
            ));
        }
    }
    if c <= 0.0 {
        return Err(Error::invalid_param("c", format!("need C > 0, got {c}")));
    }

    let d = x.ncols();
    let lambda = 1.0 / (c * r as f64);
    let radius = 1.0 / lambda.sqrt();
    // Augmented layout: columns 0..d are feature weights, column d the bias.
    let mut w = Array2::<f64>::zeros((n_classes, d + 1));

    let snapshot = |w: &Array2<f64>| LinearSvm {
        weights: w.slice(ndarray::s![.., 0..d]).to_owned(),
        biases: w.column(d).to_vec(),
        lambda,
    };
    let mut best = snapshot(&w);
    let mut best_objective = best.objective(x, y);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..r).collect();
    let mut t = 0usize;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let row = x.row(i);
            let shrink = 1.0 - eta * lambda;
            for class in 0..n_classes {
                let target = if y[i] == class { 1.0 } else { -1.0 };
                let score = {
                    let wc = w.row(class);
                    wc.slice(ndarray::s![0..d]).dot(&row) + wc[d]
                };
                let mut wc = w.row_mut(class);
                if target * score < 1.0 {
                    for (wj, xj) in wc.iter_mut().zip(row.iter().chain(std::iter::once(&1.0))) {
                        *wj = shrink * *wj + eta * target * xj;
                    }
                } else {
                    for wj in wc.iter_mut() {
                        *wj *= shrink;
                    }
                }
                // Pegasos projection onto the 1/sqrt(lambda) ball.
                let norm = wc.dot(&wc).sqrt();
                if norm > radius {
                    let scale = radius / norm;
                    for wj in wc.iter_mut() {
                        *wj *= scale;
                    }
                }
            }
        }
        let candidate = snapshot(&w);
        let epoch_objective = candidate.objective(x, y);
        if epoch_objective < best_objective {
            best_objective = epoch_objective;
            best = candidate;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use rand::Rng;

    fn blobs(
        per_class: usize,
        centers: &[[f64; 2]],
        spread: f64,
        seed: u64,
    ) -> (Array2<f64>, Vec<usize>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = per_class * centers.len();
        let mut x = Array2::zeros((rows, 2));
        let mut y = Vec::with_capacity(rows);
        for (class, center) in centers.iter().enumerate() {
            for i in 0..per_class {
                let row = class * per_class + i;
                x[(row, 0)] = center[0] + (rng.random::<f64>() - 0.5) * spread;
                x[(row, 1)] = center[1] + (rng.random::<f64>() - 0.5) * spread;
                y.push(class);
            }
        }
        (x, y)
    }

    #[test]
    fn separates_two_blobs_perfectly() {
        let (x, y) = blobs(50, &[[0.0, 0.0], [10.0, 10.0]], 1.0, 5);
        let model = train_linear_svm(x.view(), &y, 2, 1.0, 200, 1).unwrap();
        assert_eq!(model.predict(x.view()), y);
    }

    #[test]
    fn separates_three_blobs() {
        let (x, y) = blobs(30, &[[0.0, 0.0], [8.0, 0.0], [0.0, 8.0]], 1.0, 6);
        let model = train_linear_svm(x.view(), &y, 3, 1.0, 200, 2).unwrap();
        let correct = model
            .predict(x.view())
            .iter()
            .zip(&y)
            .filter(|(p, t)| p == t)
            .count();
        assert_eq!(correct, y.len());
    }

    #[test]
    fn identical_rows_fall_back_to_majority() {
        let x = Array2::from_elem((9, 3), 2.5);
        let y = vec![0, 0, 0, 0, 0, 0, 1, 1, 1];
        let model = train_linear_svm(x.view(), &y, 2, 1.0, 100, 3).unwrap();
        let preds = model.predict(x.view());
        assert!(preds.iter().all(|&p| p == 0));
    }

    #[test]
    fn training_is_deterministic() {
        let (x, y) = blobs(20, &[[0.0, 0.0], [4.0, 4.0]], 2.0, 9);
        let a = train_linear_svm(x.view(), &y, 2, 1.0, 50, 7).unwrap();
        let b = train_linear_svm(x.view(), &y, 2, 1.0, 50, 7).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.biases, b.biases);
    }

    #[test]
    fn objective_beats_zero_baseline() {
        for seed in 0..5 {
            let (x, y) = blobs(25, &[[0.0, 0.0], [3.0, 1.0]], 2.0, seed);
            let model = train_linear_svm(x.view(), &y, 2, 1.0, 100, seed).unwrap();
            let zero = LinearSvm {
                weights: Array2::zeros((2, 2)),
                biases: vec![0.0; 2],
                lambda: model.lambda,
            };
            assert!(model.objective(x.view(), &y) <= zero.objective(x.view(), &y));
        }
    }

    #[test]
    fn many_class_standardized_data_trains_well() {
        // Nine separable classes after the fashion of standardized feature
        // tables; the projection step is what keeps this stable.
        let n_classes = 9;
        let per_class = 14;
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut x = Array2::zeros((n_classes * per_class, 6));
        let mut y = Vec::new();
        for class in 0..n_classes {
            for i in 0..per_class {
                let row = class * per_class + i;
                for col in 0..6 {
                    let center = ((class * 7 + col * 3) % 11) as f64 - 5.0;
                    x[(row, col)] = center + (rng.random::<f64>() - 0.5);
                }
                y.push(class);
            }
        }
        let model = train_linear_svm(x.view(), &y, n_classes, 1.0, 200, 4).unwrap();
        let correct = model
            .predict(x.view())
            .iter()
            .zip(&y)
            .filter(|(p, t)| p == t)
            .count();
        let accuracy = correct as f64 / y.len() as f64;
        assert!(accuracy > 0.95, "training accuracy {accuracy}");
    }

    #[test]
    fn rejects_single_class() {
        let x = Array2::zeros((4, 2));
        let y = vec![1, 1, 1, 1];
        assert!(train_linear_svm(x.view(), &y, 2, 1.0, 10, 0).is_err());
    }
}
