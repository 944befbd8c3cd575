//! Benchmark orchestration: corpus management, the
//! embed -> reconstruct -> featurize -> classify pipeline, rank sweeps,
//! timing, and report emission.

pub mod corpus;
pub mod pipeline;
pub mod report;

pub use corpus::{
    build_corpus, default_manifest, CorpusClass, CorpusGraph, CorpusManifest, GraphSource,
    StructuredSpec, DEFAULT_GRAPHS_PER_CLASS,
};
pub use pipeline::{
    run_pipeline, time_embedding, BaselineReport, CellGraphRecord, CellReport, ClassMinRank,
    Environment, ExperimentConfig, ExperimentReport, GraphRecord, MinRankConfig, TimingRecord,
};
pub use report::emit_reports;
