//! Logistic PCA factorization of adjacency matrices.
//!
//! Minimizes the logistic loss
//! `L = sum_ij -log l(At_ij * [X Y^T]_ij)` over factor pairs, where `At` is
//! the sign-shifted adjacency (+1 for edges, -1 for non-edges, diagonal -1)
//! and `l` the logistic function. Factors start uniform in [-1, 1] from a
//! seed and are driven by L-BFGS.

use ndarray::{Array2, Zip};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embed::lbfgs::{self, LbfgsOptions};
use crate::embed::{Embedding, Method};
use crate::error::{Error, Result};
use crate::graph::DenseAdjacency;

/// Sign-shifted adjacency matrix: entries are `2 A - 1`, so every non-edge
/// (diagonal included) carries -1.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedAdjacency {
    n: usize,
    entries: Array2<f64>,
}

impl ShiftedAdjacency {
    pub fn from_dense(a: &DenseAdjacency) -> ShiftedAdjacency {
        ShiftedAdjacency {
            n: a.n(),
            entries: a.entries().mapv(|v| 2.0 * v - 1.0),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Entries in {-1, +1}.
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }
}

/// Numerically stable `-log l(z) = log(1 + exp(-z))`.
fn neg_log_logistic(z: f64) -> f64 {
    if z >= 0.0 {
        (-z).exp().ln_1p()
    } else {
        -z + z.exp().ln_1p()
    }
}

/// Numerically stable `l(-z) = 1 / (1 + exp(z))`.
fn logistic_neg(z: f64) -> f64 {
    if z >= 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

fn check_dims(x: &Array2<f64>, y: &Array2<f64>, at: &ShiftedAdjacency) -> Result<()> {
    let n = at.n();
    if x.nrows() != n || y.nrows() != n || x.ncols() != y.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "factors {}x{} / {}x{} do not match shifted adjacency of size {n}",
            x.nrows(),
            x.ncols(),
            y.nrows(),
            y.ncols(),
        )));
    }
    Ok(())
}

/// Exact logistic loss over all n^2 entries.
pub fn lpca_loss(x: &Array2<f64>, y: &Array2<f64>, at: &ShiftedAdjacency) -> Result<f64> {
    check_dims(x, y, at)?;
    let scores = x.dot(&y.t());
    let mut loss = 0.0;
    Zip::from(&scores).and(at.entries()).for_each(|&m, &a| {
        loss += neg_log_logistic(a * m);
    });
    Ok(loss)
}

/// Gradient of [`lpca_loss`] with respect to both factors, via the residual
/// matrix `R_ij = -At_ij * l(-At_ij * [X Y^T]_ij)`: `Gx = R Y`, `Gy = R^T X`.
pub fn lpca_gradient(
    x: &Array2<f64>,
    y: &Array2<f64>,
    at: &ShiftedAdjacency,
) -> Result<(Array2<f64>, Array2<f64>)> {
    check_dims(x, y, at)?;
    let scores = x.dot(&y.t());
    let mut residual = Array2::zeros(scores.dim());
    Zip::from(&mut residual)
        .and(&scores)
        .and(at.entries())
        .for_each(|r, &m, &a| {
            *r = -a * logistic_neg(a * m);
        });
    Ok((residual.dot(y), residual.t().dot(x)))
}

/// Loss and gradient fused around a single `X Y^T` product; this is what the
/// optimizer calls.
fn loss_and_gradient(
    x: &Array2<f64>,
    y: &Array2<f64>,
    at: &ShiftedAdjacency,
) -> (f64, Array2<f64>, Array2<f64>) {
    let scores = x.dot(&y.t());
    let mut residual = Array2::zeros(scores.dim());
    let mut loss = 0.0;
    Zip::from(&mut residual)
        .and(&scores)
        .and(at.entries())
        .for_each(|r, &m, &a| {
            let z = a * m;
            loss += neg_log_logistic(z);
            *r = -a * logistic_neg(z);
        });
    (loss, residual.dot(y), residual.t().dot(x))
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct LpcaOptions {
    /// Outer quasi-Newton iteration budget.
    pub max_iters: usize,
    /// Stop early when the gradient infinity norm drops below this.
    pub grad_tol: f64,
}

impl Default for LpcaOptions {
    fn default() -> Self {
        LpcaOptions {
            max_iters: 100,
            grad_tol: 1e-6,
        }
    }
}

/// Factorizes `a` at rank `k`, starting from factors drawn i.i.d. uniform on
/// [-1, 1] from `seed`.
///
/// A line-search breakdown is not an error: the best iterate reached is
/// returned, flagged through [`Embedding::termination`].
pub fn lpca_embed(a: &DenseAdjacency, k: usize, seed: u64, opts: &LpcaOptions) -> Result<Embedding> {
    let n = a.n();
    if k < 1 || k > n {
        return Err(Error::invalid_param(
            "k",
            format!("need 1 <= k <= n = {n}, got {k}"),
        ));
    }
    let at = ShiftedAdjacency::from_dense(a);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = Vec::with_capacity(2 * n * k);
    for _ in 0..2 * n * k {
        theta.push(rng.random::<f64>() * 2.0 - 1.0);
    }

    let unpack = |theta: &[f64]| {
        let x = Array2::from_shape_vec((n, k), theta[..n * k].to_vec()).unwrap();
        let y = Array2::from_shape_vec((n, k), theta[n * k..].to_vec()).unwrap();
        (x, y)
    };

    let lbfgs_opts = LbfgsOptions {
        max_iters: opts.max_iters,
        grad_tol: opts.grad_tol,
        ..LbfgsOptions::default()
    };
    let outcome = lbfgs::minimize(
        |theta: &[f64]| {
            let (x, y) = unpack(theta);
            let (loss, gx, gy) = loss_and_gradient(&x, &y, &at);
            let mut grad = Vec::with_capacity(theta.len());
            grad.extend(gx.iter());
            grad.extend(gy.iter());
            (loss, grad)
        },
        theta,
        &lbfgs_opts,
    );

    let (x, y) = unpack(&outcome.x);
    Ok(Embedding {
        x,
        y,
        rank: k,
        method: Method::Lpca,
        seed: Some(seed),
        iterations_used: outcome.iterations,
        final_loss: Some(outcome.value),
        termination: Some(outcome.termination),
    })
}
