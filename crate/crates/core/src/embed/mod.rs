//! Low-rank factorization of adjacency matrices and reconstruction of graphs
//! from the factors.
//!
//! Two methods share the [`Embedding`] representation: the truncated
//! spectral decomposition ([`tsvd_embed`]), whose factor product is the best
//! rank-k symmetric approximation of A, and logistic PCA
//! ([`lpca::lpca_embed`]), which minimizes a logistic loss over the
//! sign-shifted adjacency.

pub mod eigen;
pub mod lbfgs;
pub mod lpca;
mod store;

pub use eigen::{top_k_eigenpairs, EigenPairs};
pub use lbfgs::Termination;
pub use lpca::{lpca_embed, lpca_gradient, lpca_loss, LpcaOptions, ShiftedAdjacency};
pub use store::{read_embedding, write_embedding, write_embedding_text};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DenseAdjacency, Graph};

/// Score threshold above which a reconstructed entry becomes an edge.
pub const DEFAULT_BINARIZE_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Tsvd,
    Lpca,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Tsvd => write!(f, "tsvd"),
            Method::Lpca => write!(f, "lpca"),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "tsvd" => Ok(Method::Tsvd),
            "lpca" => Ok(Method::Lpca),
            other => Err(Error::invalid_param(
                "method",
                format!("unknown method `{other}` (expected tsvd or lpca)"),
            )),
        }
    }
}

/// A factor pair (X, Y) of one graph at one rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    /// n x k left factor.
    pub x: Array2<f64>,
    /// n x k right factor.
    pub y: Array2<f64>,
    pub rank: usize,
    pub method: Method,
    /// Initialization seed; None for the deterministic TSVD.
    pub seed: Option<u64>,
    /// Optimizer iterations consumed; 0 for the direct TSVD.
    pub iterations_used: usize,
    /// Final optimizer loss; None for TSVD.
    pub final_loss: Option<f64>,
    /// How the optimizer stopped; None for TSVD. `LineSearchFailed` flags a
    /// best-effort iterate rather than an error.
    pub termination: Option<Termination>,
}

impl Embedding {
    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

/// Truncated spectral embedding: with Z the top-k eigenvectors and W the
/// eigenvalues, `X = Z sign(W) sqrt(|W|)` and `Y = Z sqrt(|W|)`, so
/// `X Y^T = Z W Z^T` is the best rank-k symmetric approximation of A.
pub fn tsvd_embed(a: &DenseAdjacency, k: usize) -> Result<Embedding> {
    let pairs = top_k_eigenpairs(a, k)?;
    let n = a.n();
    let mut x = Array2::zeros((n, k));
    let mut y = Array2::zeros((n, k));
    for (col, &w) in pairs.values.iter().enumerate() {
        let root = w.abs().sqrt();
        let signed_root = if w >= 0.0 { root } else { -root };
        let z = pairs.vectors.column(col);
        for row in 0..n {
            x[(row, col)] = z[row] * signed_root;
            y[(row, col)] = z[row] * root;
        }
    }
    Ok(Embedding {
        x,
        y,
        rank: k,
        method: Method::Tsvd,
        seed: None,
        iterations_used: 0,
        final_loss: None,
        termination: None,
    })
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Edge-score matrix in [0, 1]: `X Y^T` clamped for TSVD, passed through the
/// logistic for LPCA (whose loss is logistic).
pub fn reconstruct(e: &Embedding) -> Array2<f64> {
    let scores = e.x.dot(&e.y.t());
    match e.method {
        Method::Tsvd => scores.mapv(|v| v.clamp(0.0, 1.0)),
        Method::Lpca => scores.mapv(logistic),
    }
}

/// Thresholds a score matrix into a graph: edge (u, v) iff the upper-triangle
/// score strictly exceeds `threshold`. The diagonal is ignored.
pub fn binarize(scores: &Array2<f64>, threshold: f64) -> Result<Graph> {
    let (rows, cols) = scores.dim();
    if rows != cols {
        return Err(Error::DimensionMismatch(format!(
            "score matrix must be square, got {rows}x{cols}"
        )));
    }
    let mut edges = Vec::new();
    for u in 0..rows {
        for v in (u + 1)..rows {
            if scores[(u, v)] > threshold {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(rows, edges)
}

/// Disagreement between a source adjacency and a reconstructed graph, over
/// the strict upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub mismatches: usize,
    pub mismatch_rate: f64,
    pub exact: bool,
}

pub fn reconstruction_report(a: &DenseAdjacency, g2: &Graph) -> Result<ReconstructionReport> {
    let n = a.n();
    if g2.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "adjacency has {n} nodes, reconstruction has {}",
            g2.n()
        )));
    }
    let mut mismatches = 0usize;
    for u in 0..n {
        for v in (u + 1)..n {
            if a.is_edge(u, v) != g2.has_edge(u, v) {
                mismatches += 1;
            }
        }
    }
    let pairs = n * n.saturating_sub(1) / 2;
    let mismatch_rate = if pairs == 0 {
        0.0
    } else {
        mismatches as f64 / pairs as f64
    };
    Ok(ReconstructionReport {
        mismatches,
        mismatch_rate,
        exact: mismatches == 0,
    })
}

#[derive(Debug, Clone)]
pub struct MinRankOptions {
    /// Ascending ranks to try; entries above n are clamped to n.
    pub ladder: Vec<usize>,
    /// LPCA restarts per rank (TSVD is deterministic and runs once).
    pub seeds_per_rank: usize,
    pub base_seed: u64,
    pub threshold: f64,
    pub lpca: LpcaOptions,
}

impl Default for MinRankOptions {
    fn default() -> Self {
        MinRankOptions {
            ladder: vec![5, 16, 32, 64, 128],
            seeds_per_rank: 3,
            base_seed: 0,
            threshold: DEFAULT_BINARIZE_THRESHOLD,
            lpca: LpcaOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankAttempt {
    pub rank: usize,
    pub best_mismatch_rate: f64,
}

/// Outcome of [`min_exact_rank`]: the smallest ladder rank that reproduced
/// the graph exactly (if any) and the best mismatch rate seen per rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinRankSearch {
    pub found: Option<usize>,
    pub attempts: Vec<RankAttempt>,
}

/// Walks the rank ladder and reports the first rank at which any seed yields
/// an exact binarized reconstruction.
pub fn min_exact_rank(
    a: &DenseAdjacency,
    method: Method,
    opts: &MinRankOptions,
) -> Result<MinRankSearch> {
    if opts.ladder.is_empty() {
        return Err(Error::invalid_param("ladder", "rank ladder is empty"));
    }
    if opts.ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid_param(
            "ladder",
            "rank ladder must be strictly ascending",
        ));
    }
    let mut attempts = Vec::new();
    let mut found = None;
    for &rank in &opts.ladder {
        let k = rank.min(a.n()).max(1);
        let mut best_rate = f64::INFINITY;
        let runs = match method {
            Method::Tsvd => 1,
            Method::Lpca => opts.seeds_per_rank.max(1),
        };
        for run in 0..runs {
            let embedding = match method {
                Method::Tsvd => tsvd_embed(a, k)?,
                Method::Lpca => lpca_embed(a, k, opts.base_seed + run as u64, &opts.lpca)?,
            };
            let scores = reconstruct(&embedding);
            let graph = binarize(&scores, opts.threshold)?;
            let report = reconstruction_report(a, &graph)?;
            best_rate = best_rate.min(report.mismatch_rate);
            if report.exact {
                break;
            }
        }
        attempts.push(RankAttempt {
            rank,
            best_mismatch_rate: best_rate,
        });
        if best_rate == 0.0 {
            found = Some(rank);
            break;
        }
    }
    Ok(MinRankSearch { found, attempts })
}
