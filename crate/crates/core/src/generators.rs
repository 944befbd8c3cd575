//! Seeded random graph models: Erdős–Rényi, Barabási–Albert, Chung-Lu.
//!
//! All generators are deterministic functions of their parameters and a
//! 64-bit seed, using the ChaCha8 generator (see [`crate::PRNG_ALGORITHM`]),
//! so any generated corpus can be rebuilt bit-identically from its manifest.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// A reproducible description of one generated graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    ErdosRenyi {
        n: usize,
        p: f64,
        seed: u64,
    },
    BarabasiAlbert {
        n: usize,
        m_attach: usize,
        seed: u64,
    },
    ChungLu {
        weights: Vec<f64>,
        seed: u64,
    },
    /// Chung-Lu with a bounded power-law expected-degree sequence drawn via
    /// [`make_power_law_weights`]; keeps manifests compact for large n.
    ChungLuPowerLaw {
        n: usize,
        exponent: f64,
        w_min: f64,
        w_max: f64,
        weights_seed: u64,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<Graph> {
        match self {
            GeneratorSpec::ErdosRenyi { n, p, seed } => gen_erdos_renyi(*n, *p, *seed),
            GeneratorSpec::BarabasiAlbert { n, m_attach, seed } => {
                gen_barabasi_albert(*n, *m_attach, *seed)
            }
            GeneratorSpec::ChungLu { weights, seed } => gen_chung_lu(weights, *seed),
            GeneratorSpec::ChungLuPowerLaw {
                n,
                exponent,
                w_min,
                w_max,
                weights_seed,
                seed,
            } => {
                let w = make_power_law_weights(*n, *exponent, *w_min, *w_max, *weights_seed)?;
                gen_chung_lu(&w, *seed)
            }
        }
    }

    /// Non-fatal parameter oddities worth surfacing, e.g. Chung-Lu weights
    /// large enough that pair probabilities clip at 1.
    pub fn warnings(&self) -> Vec<String> {
        match self {
            GeneratorSpec::ChungLu { weights, .. } => {
                let total: f64 = weights.iter().sum();
                let max = weights.iter().cloned().fold(0.0f64, f64::max);
                if total > 0.0 && max * max > total {
                    vec![format!(
                        "max weight {max} satisfies w^2 > sum(w) = {total}; edge probabilities clip at 1"
                    )]
                } else {
                    Vec::new()
                }
            }
            _ => Vec::new(),
        }
    }
}

/// G(n, p): every one of the C(n,2) node pairs becomes an edge independently
/// with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid_param("p", format!("{p} not in [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Preferential attachment: the seed graph is complete on `m_attach + 1`
/// nodes, and every subsequent node attaches `m_attach` edges to distinct
/// existing nodes sampled proportionally to their current degree.
///
/// The edge count is always exactly
/// `C(m_attach + 1, 2) + (n - m_attach - 1) * m_attach`.
pub fn gen_barabasi_albert(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach < 1 || m_attach >= n {
        return Err(Error::invalid_param(
            "m_attach",
            format!("need 1 <= m_attach < n, got m_attach={m_attach}, n={n}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core = m_attach + 1;
    let mut edges = Vec::with_capacity(core * (core - 1) / 2 + (n - core) * m_attach);
    for u in 0..core {
        for v in (u + 1)..core {
            edges.push((u, v));
        }
    }
    // Every edge endpoint appears once in this list, so uniform sampling
    // from it is exactly degree-proportional sampling.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.len() + 2 * (n - core) * m_attach);
    for &(u, v) in &edges {
        endpoints.push(u);
        endpoints.push(v);
    }
    let mut targets = Vec::with_capacity(m_attach);
    for new_node in core..n {
        targets.clear();
        while targets.len() < m_attach {
            let pick = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &t in &targets {
            edges.push((t, new_node));
            endpoints.push(t);
            endpoints.push(new_node);
        }
    }
    Graph::from_edges(n, edges)
}

/// Chung-Lu: pair (i, j) becomes an edge independently with probability
/// `min(1, w_i * w_j / sum(w))`. An all-zero weight vector yields the empty
/// graph.
pub fn gen_chung_lu(weights: &[f64], seed: u64) -> Result<Graph> {
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(Error::invalid_param(
            "weights",
            format!("weights must be finite and non-negative, got {w}"),
        ));
    }
    let n = weights.len();
    let total: f64 = weights.iter().sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    if total > 0.0 {
        for u in 0..n {
            for v in (u + 1)..n {
                let p = (weights[u] * weights[v] / total).min(1.0);
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Draws `n` i.i.d. expected degrees from a bounded Pareto on
/// `[w_min, w_max]` with the given tail exponent, via inverse-CDF sampling.
pub fn make_power_law_weights(
    n: usize,
    exponent: f64,
    w_min: f64,
    w_max: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if exponent <= 1.0 {
        return Err(Error::invalid_param(
            "exponent",
            format!("need exponent > 1, got {exponent}"),
        ));
    }
    if !(w_min > 0.0 && w_min <= w_max) {
        return Err(Error::invalid_param(
            "w_min/w_max",
            format!("need 0 < w_min <= w_max, got {w_min}, {w_max}"),
        ));
    }
    if w_min == w_max {
        return Ok(vec![w_min; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let one_minus_a = 1.0 - exponent;
    let ratio_pow = (w_max / w_min).powf(one_minus_a);
    let weights = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            w_min * (1.0 - u * (1.0 - ratio_pow)).powf(1.0 / one_minus_a)
        })
        .collect();
    Ok(weights)
}
