//! The embed -> reconstruct -> featurize -> classify pipeline over a corpus,
//! with per-stage timings and reconstruction quality tracking.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::corpus::{build_corpus, CorpusGraph, CorpusManifest};
use crate::classify::{
    cross_validate, prepare_dataset, ClassifierSpec, CVReport, FeaturePrep, LabeledDataset,
};
use crate::embed::{
    binarize, lpca_embed, min_exact_rank, reconstruct, reconstruction_report, tsvd_embed,
    Embedding, LpcaOptions, Method, MinRankOptions, MinRankSearch, DEFAULT_BINARIZE_THRESHOLD,
};
use crate::error::{Error, Result};
use crate::features::{extract_features, FeatureVector};
use crate::graph::{DenseAdjacency, Graph};
use crate::seedmix::derive_seed;

/// Optional per-class minimum-exact-rank search folded into a pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MinRankConfig {
    pub method: Method,
    pub ladder: Vec<usize>,
    pub seeds_per_rank: usize,
    /// How many graphs per class to search (the first ones in the manifest).
    pub graphs_per_class: usize,
}

impl Default for MinRankConfig {
    fn default() -> Self {
        MinRankConfig {
            method: Method::Lpca,
            ladder: vec![5, 16, 32, 64, 128],
            seeds_per_rank: 3,
            graphs_per_class: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub manifest: CorpusManifest,
    pub methods: Vec<Method>,
    pub rank_ladder: Vec<usize>,
    pub classifier: ClassifierSpec,
    pub cv_folds: usize,
    pub seed: u64,
    /// Worker threads for per-graph stages; 0 = all available. Results do
    /// not depend on this, only wall time does.
    pub threads: usize,
    pub binarize_threshold: f64,
    pub feature_prep: FeaturePrep,
    pub lpca: LpcaOptions,
    /// Also score the original (unreconstructed) graphs as a reference row.
    pub include_baseline: bool,
    pub min_rank: Option<MinRankConfig>,
    /// Abort when more than this fraction of the corpus fails in any cell.
    pub failure_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            manifest: crate::bench::corpus::default_manifest(0),
            methods: vec![Method::Tsvd, Method::Lpca],
            rank_ladder: vec![16, 32, 64],
            classifier: ClassifierSpec::default(),
            cv_folds: 10,
            seed: 0,
            threads: 0,
            binarize_threshold: DEFAULT_BINARIZE_THRESHOLD,
            feature_prep: FeaturePrep::default(),
            lpca: LpcaOptions::default(),
            include_baseline: true,
            min_rank: None,
            failure_tolerance: 0.05,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.manifest.validate()?;
        if self.methods.is_empty() {
            return Err(Error::invalid_param("methods", "need at least one method"));
        }
        if self
            .methods
            .iter()
            .enumerate()
            .any(|(i, m)| self.methods[..i].contains(m))
        {
            return Err(Error::invalid_param("methods", "duplicate method"));
        }
        if self.rank_ladder.is_empty() {
            return Err(Error::invalid_param("rank_ladder", "need at least one rank"));
        }
        if self.rank_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid_param(
                "rank_ladder",
                "ranks must be strictly ascending",
            ));
        }
        if self.rank_ladder[0] < 1 {
            return Err(Error::invalid_param("rank_ladder", "ranks must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.binarize_threshold) {
            return Err(Error::invalid_param(
                "binarize_threshold",
                "must lie in [0, 1]",
            ));
        }
        if self.cv_folds < 2 {
            return Err(Error::invalid_param("cv_folds", "need >= 2 folds"));
        }
        if !(0.0..=1.0).contains(&self.failure_tolerance) {
            return Err(Error::invalid_param(
                "failure_tolerance",
                "must lie in [0, 1]",
            ));
        }
        Ok(())
    }

    /// FNV-1a hash of the canonical JSON form; names every emitted file.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
        for byte in json.as_bytes() {
            hash ^= *byte as u64;
            hash = hash.wrapping_mul(0x1000_0000_01b3);
        }
        format!("{hash:016x}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub name: String,
    pub class: usize,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellGraphRecord {
    /// Index into [`ExperimentReport::graphs`].
    pub graph: usize,
    pub embed_seconds: f64,
    pub feature_seconds: f64,
    pub mismatch_rate: f64,
    pub embed_iterations: usize,
    pub excluded: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub method: Method,
    pub rank: usize,
    pub cv: CVReport,
    pub per_graph: Vec<CellGraphRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub cv: CVReport,
    pub feature_seconds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMinRank {
    pub class_name: String,
    pub graph_name: String,
    pub n: usize,
    pub avg_degree: f64,
    pub search: MinRankSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub threads: usize,
    pub prng: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub class_names: Vec<String>,
    pub graphs: Vec<GraphRecord>,
    pub baseline: Option<BaselineReport>,
    pub cells: Vec<CellReport>,
    pub min_rank: Vec<ClassMinRank>,
    pub environment: Environment,
}

impl ExperimentReport {
    /// The report as JSON with every wall-clock field removed; two runs of
    /// the same config must agree on this byte-for-byte.
    pub fn deterministic_json(&self) -> String {
        let mut value = serde_json::to_value(self).expect("report serializes");
        strip_timing(&mut value);
        serde_json::to_string_pretty(&value).expect("stripped report serializes")
    }
}

fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            map.retain(|key, _| !key.ends_with("_seconds"));
            for child in map.values_mut() {
                strip_timing(child);
            }
        }
        serde_json::Value::Array(items) => {
            for child in items.iter_mut() {
                strip_timing(child);
            }
        }
        _ => {}
    }
}

fn embed_seed(base: u64, method: Method, rank: usize, graph_idx: usize) -> u64 {
    let method_salt = match method {
        Method::Tsvd => 1,
        Method::Lpca => 2,
    };
    derive_seed(
        derive_seed(derive_seed(base, method_salt), rank as u64),
        graph_idx as u64,
    )
}

fn embed_graph(
    graph: &Graph,
    method: Method,
    rank: usize,
    seed: u64,
    lpca: &LpcaOptions,
) -> Result<Embedding> {
    let a = DenseAdjacency::from_graph(graph)?;
    let k = rank.min(graph.n()).max(1);
    match method {
        Method::Tsvd => tsvd_embed(&a, k),
        Method::Lpca => lpca_embed(&a, k, seed, lpca),
    }
}

struct GraphOutcome {
    record: CellGraphRecord,
    features: Option<FeatureVector>,
}

fn run_cell_graph(
    graph_idx: usize,
    corpus_graph: &CorpusGraph,
    method: Method,
    rank: usize,
    config: &ExperimentConfig,
) -> GraphOutcome {
    let fail = |error: Error| GraphOutcome {
        record: CellGraphRecord {
            graph: graph_idx,
            embed_seconds: 0.0,
            feature_seconds: 0.0,
            mismatch_rate: f64::NAN,
            embed_iterations: 0,
            excluded: true,
            error: Some(error.to_string()),
        },
        features: None,
    };

    let graph = &corpus_graph.graph;
    let seed = embed_seed(config.seed, method, rank, graph_idx);
    let embed_start = Instant::now();
    let embedding = match embed_graph(graph, method, rank, seed, &config.lpca) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let embed_seconds = embed_start.elapsed().as_secs_f64();

    let scores = reconstruct(&embedding);
    let reconstructed = match binarize(&scores, config.binarize_threshold) {
        Ok(g) => g,
        Err(e) => return fail(e),
    };
    let mismatch_rate = match DenseAdjacency::from_graph(graph)
        .and_then(|a| reconstruction_report(&a, &reconstructed))
    {
        Ok(report) => report.mismatch_rate,
        Err(e) => return fail(e),
    };

    let feature_start = Instant::now();
    let features = match extract_features(&reconstructed) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let feature_seconds = feature_start.elapsed().as_secs_f64();

    GraphOutcome {
        record: CellGraphRecord {
            graph: graph_idx,
            embed_seconds,
            feature_seconds,
            mismatch_rate,
            embed_iterations: embedding.iterations_used,
            excluded: false,
            error: None,
        },
        features: Some(features),
    }
}

fn cell_dataset(
    outcomes: &[GraphOutcome],
    corpus: &[CorpusGraph],
    class_names: &[String],
    prep: FeaturePrep,
) -> Result<LabeledDataset> {
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for outcome in outcomes {
        if let Some(f) = &outcome.features {
            features.push(f.clone());
            labels.push(corpus[outcome.record.graph].class);
        }
    }
    prepare_dataset(&features, labels, class_names.to_vec(), prep)
}

/// Runs the full benchmark described by `config`.
///
/// Per-graph work inside each (method, rank) cell runs in parallel; outputs
/// are reduced in corpus order, so reports are identical whatever the thread
/// count. Graphs failing a stage are excluded from that cell with a recorded
/// error, up to `failure_tolerance`; beyond it the run aborts.
pub fn run_pipeline(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Dataset(format!("thread pool: {e}")))?;
    pool.install(|| run_pipeline_inner(config))
}

fn run_pipeline_inner(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let corpus = build_corpus(&config.manifest)?;
    let class_names = config.manifest.class_names();
    let graphs: Vec<GraphRecord> = corpus
        .iter()
        .map(|cg| GraphRecord {
            name: cg.name.clone(),
            class: cg.class,
            n: cg.graph.n(),
            m: cg.graph.m(),
        })
        .collect();

    // One CV seed shared by the baseline and every cell: identical feature
    // sets then score identically (this is what makes full-rank TSVD exactly
    // reproduce the baseline row).
    let cv_seed = derive_seed(config.seed, u64::MAX);
    let max_failures = (config.failure_tolerance * corpus.len() as f64).floor() as usize;

    let baseline = if config.include_baseline {
        let timed: Vec<(Result<FeatureVector>, f64)> = corpus
            .par_iter()
            .map(|cg| {
                let start = Instant::now();
                let features = extract_features(&cg.graph);
                (features, start.elapsed().as_secs_f64())
            })
            .collect();
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut feature_seconds = Vec::new();
        for ((result, seconds), cg) in timed.into_iter().zip(&corpus) {
            let f = result.map_err(|e| Error::Corpus {
                entry: cg.name.clone(),
                source: Box::new(e),
            })?;
            features.push(f);
            labels.push(cg.class);
            feature_seconds.push(seconds);
        }
        let dataset = prepare_dataset(&features, labels, class_names.clone(), config.feature_prep)?;
        let cv = cross_validate(&dataset, &config.classifier, config.cv_folds, cv_seed)?;
        Some(BaselineReport {
            cv,
            feature_seconds,
        })
    } else {
        None
    };

    let mut cells = Vec::new();
    for &method in &config.methods {
        for &rank in &config.rank_ladder {
            let outcomes: Vec<GraphOutcome> = corpus
                .par_iter()
                .enumerate()
                .map(|(graph_idx, cg)| run_cell_graph(graph_idx, cg, method, rank, config))
                .collect();
            let failures = outcomes.iter().filter(|o| o.record.excluded).count();
            if failures > max_failures {
                return Err(Error::PipelineAborted {
                    failed: failures,
                    total: corpus.len(),
                    tolerance_pct: config.failure_tolerance * 100.0,
                });
            }
            let dataset = cell_dataset(&outcomes, &corpus, &class_names, config.feature_prep)?;
            let cv = cross_validate(&dataset, &config.classifier, config.cv_folds, cv_seed)?;
            cells.push(CellReport {
                method,
                rank,
                cv,
                per_graph: outcomes.into_iter().map(|o| o.record).collect(),
            });
        }
    }

    let mut min_rank = Vec::new();
    if let Some(mr) = &config.min_rank {
        let opts = MinRankOptions {
            ladder: mr.ladder.clone(),
            seeds_per_rank: mr.seeds_per_rank,
            base_seed: derive_seed(config.seed, 0x4d52),
            threshold: config.binarize_threshold,
            lpca: config.lpca,
        };
        for (class_idx, class_name) in class_names.iter().enumerate() {
            let members: Vec<(usize, &CorpusGraph)> = corpus
                .iter()
                .enumerate()
                .filter(|(_, cg)| cg.class == class_idx)
                .take(mr.graphs_per_class)
                .collect();
            for (_, cg) in members {
                let a = DenseAdjacency::from_graph(&cg.graph)?;
                let search = min_exact_rank(&a, mr.method, &opts)?;
                min_rank.push(ClassMinRank {
                    class_name: class_name.clone(),
                    graph_name: cg.name.clone(),
                    n: cg.graph.n(),
                    avg_degree: 2.0 * cg.graph.m() as f64 / cg.graph.n().max(1) as f64,
                    search,
                });
            }
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        config_hash: config.hash(),
        class_names,
        graphs,
        baseline,
        cells,
        min_rank,
        environment: Environment {
            threads: rayon::current_num_threads(),
            prng: crate::PRNG_ALGORITHM.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    })
}

/// Wall-clock timing of the embed call alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRecord {
    pub method: Method,
    pub rank: usize,
    pub repeats: usize,
    pub seconds: Vec<f64>,
    pub median_seconds: f64,
    pub threads: usize,
}

/// Medians the wall time of `repeats` identical embed calls. The embedding
/// result itself is deterministic across repeats; only the clock varies.
pub fn time_embedding(
    graph: &Graph,
    method: Method,
    rank: usize,
    repeats: usize,
    seed: u64,
    lpca: &LpcaOptions,
) -> Result<TimingRecord> {
    if repeats == 0 {
        return Err(Error::invalid_param("repeats", "need at least one repeat"));
    }
    let mut seconds = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        let embedding = embed_graph(graph, method, rank, seed, lpca)?;
        seconds.push(start.elapsed().as_secs_f64());
        drop(embedding);
    }
    let mut sorted = seconds.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median_seconds = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    Ok(TimingRecord {
        method,
        rank,
        repeats,
        seconds,
        median_seconds,
        threads: rayon::current_num_threads(),
    })
}
