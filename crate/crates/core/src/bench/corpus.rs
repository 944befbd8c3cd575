//! Corpus manifests: named graph classes backed by files or seeded
//! generators, and the default synthetic nine-class surrogate corpus.

use std::path::PathBuf;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::graph::{load_graph, Graph, GraphFormat};
use crate::seedmix::derive_seed;

/// One graph of a corpus class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GraphSource {
    File {
        path: PathBuf,
        #[serde(default)]
        format: GraphFormat,
    },
    Generator {
        spec: GeneratorSpec,
    },
    Structured {
        spec: StructuredSpec,
    },
}

/// Structured synthetic families used by the surrogate corpus alongside the
/// classic random models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum StructuredSpec {
    /// A few hub nodes in a clique, every other node spoked onto one hub,
    /// plus sparse uniform noise edges.
    StarsWithNoise {
        n: usize,
        hubs: usize,
        noise_p: f64,
        seed: u64,
    },
    /// A rows x cols grid with a fraction of edge endpoints rewired to
    /// uniform random nodes.
    NearLattice {
        rows: usize,
        cols: usize,
        rewire_p: f64,
        seed: u64,
    },
}

impl StructuredSpec {
    pub fn generate(&self) -> Result<Graph> {
        match *self {
            StructuredSpec::StarsWithNoise {
                n,
                hubs,
                noise_p,
                seed,
            } => stars_with_noise(n, hubs, noise_p, seed),
            StructuredSpec::NearLattice {
                rows,
                cols,
                rewire_p,
                seed,
            } => near_lattice(rows, cols, rewire_p, seed),
        }
    }
}

fn stars_with_noise(n: usize, hubs: usize, noise_p: f64, seed: u64) -> Result<Graph> {
    if hubs == 0 || hubs >= n {
        return Err(Error::invalid_param(
            "hubs",
            format!("need 1 <= hubs < n, got hubs={hubs}, n={n}"),
        ));
    }
    if !(0.0..=1.0).contains(&noise_p) {
        return Err(Error::invalid_param(
            "noise_p",
            format!("{noise_p} not in [0, 1]"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..hubs {
        for v in (u + 1)..hubs {
            edges.push((u, v));
        }
    }
    for v in hubs..n {
        edges.push((v % hubs, v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < noise_p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

fn near_lattice(rows: usize, cols: usize, rewire_p: f64, seed: u64) -> Result<Graph> {
    let n = rows * cols;
    if n < 2 {
        return Err(Error::invalid_param("rows/cols", "grid needs >= 2 nodes"));
    }
    if !(0.0..=1.0).contains(&rewire_p) {
        return Err(Error::invalid_param(
            "rewire_p",
            format!("{rewire_p} not in [0, 1]"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let at = |r: usize, c: usize| r * cols + c;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let mut push = |a: usize, b: usize| {
                if rng.random::<f64>() < rewire_p {
                    edges.push((a, rng.random_range(0..n)));
                } else {
                    edges.push((a, b));
                }
            };
            if c + 1 < cols {
                push(at(r, c), at(r, c + 1));
            }
            if r + 1 < rows {
                push(at(r, c), at(r + 1, c));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusClass {
    pub name: String,
    pub sources: Vec<GraphSource>,
}

/// A reproducible corpus description: every generated entry embeds its own
/// seed, so rebuilding yields bit-identical graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub classes: Vec<CorpusClass>,
    pub corpus_seed: u64,
    /// PRNG identity behind all embedded seeds.
    pub prng: String,
}

impl CorpusManifest {
    pub fn validate(&self) -> Result<()> {
        if self.classes.len() < 2 {
            return Err(Error::Dataset(format!(
                "corpus needs >= 2 classes, got {}",
                self.classes.len()
            )));
        }
        for (i, class) in self.classes.iter().enumerate() {
            if class.sources.is_empty() {
                return Err(Error::Dataset(format!("class `{}` has no graphs", class.name)));
            }
            if self.classes[..i].iter().any(|c| c.name == class.name) {
                return Err(Error::Dataset(format!(
                    "duplicate class name `{}`",
                    class.name
                )));
            }
        }
        Ok(())
    }

    pub fn class_names(&self) -> Vec<String> {
        self.classes.iter().map(|c| c.name.clone()).collect()
    }
}

/// One realized corpus graph.
#[derive(Debug, Clone)]
pub struct CorpusGraph {
    pub graph: Graph,
    pub class: usize,
    /// Entry id, e.g. `er-sparse[3]` or the source file path.
    pub name: String,
}

/// Loads or generates every manifest entry. Fails atomically: any failing
/// entry aborts the build, naming the entry.
pub fn build_corpus(manifest: &CorpusManifest) -> Result<Vec<CorpusGraph>> {
    manifest.validate()?;
    let mut graphs = Vec::new();
    for (class_idx, class) in manifest.classes.iter().enumerate() {
        for (source_idx, source) in class.sources.iter().enumerate() {
            let name = match source {
                GraphSource::File { path, .. } => path.display().to_string(),
                _ => format!("{}[{}]", class.name, source_idx),
            };
            let graph = match source {
                GraphSource::File { path, format } => load_graph(path, *format),
                GraphSource::Generator { spec } => spec.generate(),
                GraphSource::Structured { spec } => spec.generate(),
            }
            .map_err(|e| Error::Corpus {
                entry: name.clone(),
                source: Box::new(e),
            })?;
            graphs.push(CorpusGraph {
                graph,
                class: class_idx,
                name,
            });
        }
    }
    Ok(graphs)
}

/// Graphs per class in the default surrogate corpus.
pub const DEFAULT_GRAPHS_PER_CLASS: usize = 15;

fn lerp(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// The default nine-class synthetic corpus standing in for the mixed
/// real/random benchmark corpus: three Erdős–Rényi density regimes, light
/// and heavy Barabási–Albert and Chung-Lu variants, hubs-plus-noise stars,
/// and near-lattices. All parameters are materialized here so the manifest
/// embeds concrete, reproducible specs.
pub fn default_manifest(corpus_seed: u64) -> CorpusManifest {
    let per_class = DEFAULT_GRAPHS_PER_CLASS;
    let mut classes = Vec::new();
    type MakeSource = Box<dyn Fn(&mut ChaCha8Rng, u64) -> GraphSource>;
    let class_defs: Vec<(&str, MakeSource)> = vec![
        (
            "er-sparse",
            Box::new(|rng, seed| GraphSource::Generator {
                spec: GeneratorSpec::ErdosRenyi {
                    n: rng.random_range(220..=420),
                    p: lerp(rng, 0.015, 0.03),
                    seed,
                },
            }),
        ),
        (
            "er-mid",
            Box::new(|rng, seed| GraphSource::Generator {
                spec: GeneratorSpec::ErdosRenyi {
                    n: rng.random_range(220..=420),
                    p: lerp(rng, 0.05, 0.08),
                    seed,
                },
            }),
        ),
        (
            "er-dense",
            Box::new(|rng, seed| GraphSource::Generator {
                spec: GeneratorSpec::ErdosRenyi {
                    n: rng.random_range(200..=360),
                    p: lerp(rng, 0.12, 0.18),
                    seed,
                },
            }),
        ),
        (
            "ba-light",
            Box::new(|rng, seed| GraphSource::Generator {
                spec: GeneratorSpec::BarabasiAlbert {
                    n: rng.random_range(220..=420),
                    m_attach: rng.random_range(2..=4),
                    seed,
                },
            }),
        ),
        (
            "ba-heavy",
            Box::new(|rng, seed| GraphSource::Generator {
                spec: GeneratorSpec::BarabasiAlbert {
                    n: rng.random_range(200..=360),
                    m_attach: rng.random_range(15..=25),
                    seed,
                },
            }),
        ),
        (
            "cl-light",
            Box::new(|rng, seed| {
                let n = rng.random_range(220..=420);
                GraphSource::Generator {
                    spec: GeneratorSpec::ChungLuPowerLaw {
                        n,
                        exponent: lerp(rng, 2.4, 2.8),
                        w_min: 1.5,
                        w_max: (4.0 * n as f64).sqrt(),
                        weights_seed: seed,
                        seed: seed ^ 0xc1,
                    },
                }
            }),
        ),
        (
            "cl-heavy",
            Box::new(|rng, seed| {
                let n = rng.random_range(200..=360);
                GraphSource::Generator {
                    spec: GeneratorSpec::ChungLuPowerLaw {
                        n,
                        exponent: lerp(rng, 2.0, 2.2),
                        w_min: 6.0,
                        w_max: 0.9 * (6.0 * n as f64).sqrt(),
                        weights_seed: seed,
                        seed: seed ^ 0xc2,
                    },
                }
            }),
        ),
        (
            "star-noise",
            Box::new(|rng, seed| GraphSource::Structured {
                spec: StructuredSpec::StarsWithNoise {
                    n: rng.random_range(220..=420),
                    hubs: rng.random_range(3..=6),
                    noise_p: lerp(rng, 0.004, 0.01),
                    seed,
                },
            }),
        ),
        (
            "near-lattice",
            Box::new(|rng, seed| GraphSource::Structured {
                spec: StructuredSpec::NearLattice {
                    rows: rng.random_range(15..=20),
                    cols: rng.random_range(14..=21),
                    rewire_p: lerp(rng, 0.02, 0.08),
                    seed,
                },
            }),
        ),
    ];

    for (class_idx, (name, make)) in class_defs.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(corpus_seed, class_idx as u64));
        let sources = (0..per_class)
            .map(|i| {
                let seed = derive_seed(corpus_seed, (class_idx as u64) << 16 | i as u64);
                make(&mut rng, seed)
            })
            .collect();
        classes.push(CorpusClass {
            name: name.to_string(),
            sources,
        });
    }
    CorpusManifest {
        classes,
        corpus_seed,
        prng: crate::PRNG_ALGORITHM.to_string(),
    }
}
