//! `lownet` — embed networks into low-rank factors, reconstruct them,
//! extract structural features, and benchmark how well reconstructions
//! preserve class identity.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! non-convergence.

mod feature_csv;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lownet::bench::{
    default_manifest, emit_reports, run_pipeline, time_embedding, ExperimentConfig,
};
use lownet::classify::{cross_validate, holdout_evaluate, ClassifierSpec};
use lownet::embed::{
    binarize, lpca_embed, min_exact_rank, read_embedding, reconstruct, reconstruction_report,
    tsvd_embed, write_embedding, write_embedding_text, LpcaOptions, Method, MinRankOptions,
    DEFAULT_BINARIZE_THRESHOLD,
};
use lownet::error::ErrorCategory;
use lownet::features::extract_features;
use lownet::generators::{gen_barabasi_albert, gen_erdos_renyi, make_power_law_weights};
use lownet::graph::{save_graph, DenseAdjacency, Graph, GraphFormat};
use lownet::{Error, Result};

#[derive(Parser)]
#[command(name = "lownet", version, about = "Low-rank network embedding benchmark toolkit")]
struct Cli {
    /// Seed for all stochastic stages of the subcommand.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for parallel stages (0 or omitted = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random graph and write it to a file.
    Generate {
        #[command(subcommand)]
        model: GenerateModel,
    },
    /// Compute the structural feature vector of a graph.
    Features {
        /// Input graph (edge list or MatrixMarket).
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Auto)]
        format: FormatArg,
        /// Print CSV (header + row) instead of JSON.
        #[arg(long)]
        csv: bool,
        /// Write to a file instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Factor a graph into a low-rank embedding.
    Embed {
        graph: PathBuf,
        #[arg(long)]
        method: Method,
        #[arg(long)]
        rank: usize,
        /// LPCA optimizer iteration budget.
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write a plain-text factor dump here.
        #[arg(long)]
        text_dump: Option<PathBuf>,
    },
    /// Reconstruct a graph from a stored embedding.
    Reconstruct {
        embedding: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BINARIZE_THRESHOLD)]
        threshold: f64,
        #[arg(short, long)]
        out: PathBuf,
        /// Compare against this source graph and print a mismatch report.
        #[arg(long)]
        compare: Option<PathBuf>,
    },
    /// Find the smallest rank that reconstructs a graph exactly.
    MinRank {
        graph: PathBuf,
        #[arg(long)]
        method: Method,
        /// Comma-separated ascending rank ladder.
        #[arg(long, value_delimiter = ',', default_values_t = vec![5, 16, 32, 64, 128])]
        ladder: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        seeds_per_rank: usize,
        #[arg(long, default_value_t = DEFAULT_BINARIZE_THRESHOLD)]
        threshold: f64,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
    },
    /// Cross-validate classifiers on a feature CSV with a `class` column.
    Classify {
        /// Feature table: CSV with header; one `class` column holds labels.
        features: PathBuf,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Evaluate a single stratified holdout split of this test fraction
        /// instead of cross-validation.
        #[arg(long)]
        holdout: Option<f64>,
        /// Also write report.json, per_fold.csv, and confusion.csv here.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Run the full embed/reconstruct/featurize/classify benchmark.
    Pipeline {
        /// Experiment configuration JSON; omit to run the default synthetic
        /// corpus.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory for reports.
        #[arg(long, default_value = "lownet-report")]
        out: PathBuf,
        /// Print the default configuration JSON and exit.
        #[arg(long)]
        emit_default_config: bool,
    },
    /// Time embedding methods on one graph across ranks.
    BenchTime {
        graph: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = vec![Method::Tsvd, Method::Lpca])]
        methods: Vec<Method>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![16, 32, 64])]
        ranks: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        #[arg(long, default_value_t = 100)]
        max_iters: usize,
    },
}

#[derive(Subcommand)]
enum GenerateModel {
    /// Erdős–Rényi G(n, p).
    Er {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        prob: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Barabási–Albert preferential attachment.
    Ba {
        #[arg(long)]
        nodes: usize,
        /// Edges attached by each new node.
        #[arg(long)]
        attach: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Chung-Lu with bounded power-law expected degrees.
    Cl {
        #[arg(long)]
        nodes: usize,
        #[arg(long, default_value_t = 2.5)]
        exponent: f64,
        #[arg(long, default_value_t = 1.0)]
        w_min: f64,
        #[arg(long)]
        w_max: f64,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ClassifierArgs {
    /// Classifier kind.
    #[arg(long, default_value = "svm")]
    classifier: String,
    /// SVM regularization weight.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// SVM training epochs.
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    /// KNN neighbor count.
    #[arg(long, default_value_t = 5)]
    k_neighbors: usize,
}

impl ClassifierArgs {
    fn spec(&self) -> Result<ClassifierSpec> {
        match self.classifier.to_ascii_lowercase().as_str() {
            "svm" => Ok(ClassifierSpec::Svm {
                c: self.c,
                epochs: self.epochs,
            }),
            "knn" => Ok(ClassifierSpec::Knn {
                k_neighbors: self.k_neighbors,
            }),
            other => Err(Error::InvalidParam {
                name: "classifier",
                msg: format!("unknown classifier `{other}` (expected svm or knn)"),
            }),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum FormatArg {
    Auto,
    EdgeList,
    MatrixMarket,
}

impl From<FormatArg> for GraphFormat {
    fn from(value: FormatArg) -> GraphFormat {
        match value {
            FormatArg::Auto => GraphFormat::Auto,
            FormatArg::EdgeList => GraphFormat::EdgeList,
            FormatArg::MatrixMarket => GraphFormat::MatrixMarket,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not errors.
            let _ = err.print();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    let seed = cli.seed.unwrap_or(0);
    if let Some(threads) = cli.threads {
        // Affects every rayon-parallel stage in this process.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli, seed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.category() {
                ErrorCategory::Usage => ExitCode::from(1),
                ErrorCategory::Data => ExitCode::from(2),
                ErrorCategory::Numerical => ExitCode::from(3),
            }
        }
    }
}

fn print_or_write(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json_pretty<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("value serializes")
}

fn run(cli: Cli, seed: u64) -> Result<()> {
    match cli.command {
        Command::Generate { model } => {
            let (graph, out) = match model {
                GenerateModel::Er { nodes, prob, out } => {
                    (gen_erdos_renyi(nodes, prob, seed)?, out)
                }
                GenerateModel::Ba { nodes, attach, out } => {
                    (gen_barabasi_albert(nodes, attach, seed)?, out)
                }
                GenerateModel::Cl {
                    nodes,
                    exponent,
                    w_min,
                    w_max,
                    out,
                } => {
                    let weights = make_power_law_weights(nodes, exponent, w_min, w_max, seed)?;
                    let spec = lownet::generators::GeneratorSpec::ChungLu {
                        weights,
                        seed: seed.wrapping_add(1),
                    };
                    for warning in spec.warnings() {
                        eprintln!("warning: {warning}");
                    }
                    (spec.generate()?, out)
                }
            };
            save_graph(&graph, &out, GraphFormat::Auto)?;
            eprintln!(
                "wrote {} ({} nodes, {} edges, seed {seed})",
                out.display(),
                graph.n(),
                graph.m()
            );
            Ok(())
        }

        Command::Features {
            graph,
            format,
            csv,
            out,
        } => {
            let g = load_and_warn(&graph, format.into())?;
            let features = extract_features(&g)?;
            let text = if csv {
                format!(
                    "{}\n{}",
                    lownet::features::FeatureVector::CSV_HEADER,
                    features.to_csv_row()
                )
            } else {
                json_pretty(&features)
            };
            print_or_write(&text, out.as_ref())
        }

        Command::Embed {
            graph,
            method,
            rank,
            max_iters,
            out,
            text_dump,
        } => {
            let g = load_and_warn(&graph, GraphFormat::Auto)?;
            let a = DenseAdjacency::from_graph(&g)?;
            let embedding = match method {
                Method::Tsvd => tsvd_embed(&a, rank)?,
                Method::Lpca => lpca_embed(
                    &a,
                    rank,
                    seed,
                    &LpcaOptions {
                        max_iters,
                        ..LpcaOptions::default()
                    },
                )?,
            };
            write_embedding(&embedding, &out)?;
            if let Some(dump) = text_dump {
                write_embedding_text(&embedding, &dump)?;
            }
            eprintln!(
                "wrote {} (method {}, rank {}, iterations {}{})",
                out.display(),
                embedding.method,
                embedding.rank,
                embedding.iterations_used,
                embedding
                    .final_loss
                    .map(|l| format!(", loss {l:.6e}"))
                    .unwrap_or_default()
            );
            Ok(())
        }

        Command::Reconstruct {
            embedding,
            threshold,
            out,
            compare,
        } => {
            let e = read_embedding(&embedding)?;
            let scores = reconstruct(&e);
            let graph = binarize(&scores, threshold)?;
            save_graph(&graph, &out, GraphFormat::Auto)?;
            eprintln!(
                "wrote {} ({} nodes, {} edges)",
                out.display(),
                graph.n(),
                graph.m()
            );
            if let Some(source_path) = compare {
                let source = load_and_warn(&source_path, GraphFormat::Auto)?;
                let a = DenseAdjacency::from_graph(&source)?;
                let report = reconstruction_report(&a, &graph)?;
                println!("{}", json_pretty(&report));
            }
            Ok(())
        }

        Command::MinRank {
            graph,
            method,
            ladder,
            seeds_per_rank,
            threshold,
            max_iters,
        } => {
            let g = load_and_warn(&graph, GraphFormat::Auto)?;
            let a = DenseAdjacency::from_graph(&g)?;
            let opts = MinRankOptions {
                ladder,
                seeds_per_rank,
                base_seed: seed,
                threshold,
                lpca: LpcaOptions {
                    max_iters,
                    ..LpcaOptions::default()
                },
            };
            let search = min_exact_rank(&a, method, &opts)?;
            println!("{}", json_pretty(&search));
            Ok(())
        }

        Command::Classify {
            features,
            classifier,
            folds,
            holdout,
            out_dir,
        } => {
            let dataset = feature_csv::load_labeled_csv(&features)?;
            let spec = classifier.spec()?;
            let write_to = |name: &str, contents: &str| -> Result<()> {
                if let Some(dir) = &out_dir {
                    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                        path: dir.clone(),
                        source,
                    })?;
                    print_or_write(contents, Some(&dir.join(name)))?;
                }
                Ok(())
            };
            match holdout {
                Some(fraction) => {
                    let report = holdout_evaluate(&dataset, &spec, fraction, seed)?;
                    println!("{}", json_pretty(&report));
                    write_to("report.json", &json_pretty(&report))?;
                }
                None => {
                    let report = cross_validate(&dataset, &spec, folds, seed)?;
                    println!("{}", json_pretty(&report));
                    write_to("report.json", &json_pretty(&report))?;
                    write_to("per_fold.csv", &report.per_fold_csv())?;
                    write_to(
                        "confusion.csv",
                        &report.confusion_csv(dataset.class_names()),
                    )?;
                }
            }
            Ok(())
        }

        Command::Pipeline {
            config,
            out,
            emit_default_config,
        } => {
            if emit_default_config {
                println!("{}", json_pretty(&ExperimentConfig::default()));
                return Ok(());
            }
            let mut experiment = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| Error::Io {
                        path: path.clone(),
                        source,
                    })?;
                    serde_json::from_str::<ExperimentConfig>(&text).map_err(|e| Error::Parse {
                        path,
                        line: e.line(),
                        msg: e.to_string(),
                    })?
                }
                None => ExperimentConfig {
                    manifest: default_manifest(seed),
                    ..ExperimentConfig::default()
                },
            };
            if let Some(s) = cli.seed {
                experiment.seed = s;
            }
            if let Some(t) = cli.threads {
                experiment.threads = t;
            }
            let report = run_pipeline(&experiment)?;
            let files = emit_reports(&report, &out)?;
            for cell in &report.cells {
                println!(
                    "{} rank {:>4}: macro-F1 {:.4} (weighted {:.4})",
                    cell.method, cell.rank, cell.cv.mean_f1, cell.cv.mean_f1_weighted
                );
            }
            if let Some(baseline) = &report.baseline {
                println!(
                    "baseline (original graphs): macro-F1 {:.4} (weighted {:.4})",
                    baseline.cv.mean_f1, baseline.cv.mean_f1_weighted
                );
            }
            eprintln!("wrote {} files to {}", files.len(), out.display());
            Ok(())
        }

        Command::BenchTime {
            graph,
            methods,
            ranks,
            repeats,
            max_iters,
        } => {
            let g = load_and_warn(&graph, GraphFormat::Auto)?;
            let lpca = LpcaOptions {
                max_iters,
                ..LpcaOptions::default()
            };
            println!("method,rank,repeats,median_seconds,threads");
            for &method in &methods {
                for &rank in &ranks {
                    let timing = time_embedding(&g, method, rank, repeats, seed, &lpca)?;
                    println!(
                        "{},{},{},{},{}",
                        timing.method,
                        timing.rank,
                        timing.repeats,
                        timing.median_seconds,
                        timing.threads
                    );
                }
            }
            Ok(())
        }
    }
}

fn load_and_warn(path: &PathBuf, format: GraphFormat) -> Result<Graph> {
    let (graph, stats) = lownet::graph::load_graph_counted(path, format)?;
    if !stats.is_clean() {
        eprintln!(
            "warning: dropped {} self-loops and {} duplicate edges from {}",
            stats.self_loops_dropped,
            stats.duplicates_dropped,
            path.display()
        );
    }
    Ok(graph)
}
