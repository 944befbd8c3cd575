//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p lownet --test acceptance -- --nocapture` to see
//! the verdict lines and timings.

use std::time::Instant;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use lownet::classify::{cross_validate, ClassifierSpec, LabeledDataset};
use lownet::embed::{
    binarize, lpca_embed, lpca_gradient, lpca_loss, reconstruct, reconstruction_report,
    tsvd_embed, LpcaOptions, Method, ShiftedAdjacency, DEFAULT_BINARIZE_THRESHOLD,
};
use lownet::features;
use lownet::generators::{
    gen_barabasi_albert, gen_chung_lu, gen_erdos_renyi, make_power_law_weights,
};
use lownet::graph::{load_graph, DenseAdjacency, Graph, GraphFormat};

/// Prints the verdict line even when the criterion body panics.
struct Verdict {
    name: &'static str,
    passed: bool,
    start: Instant,
}

impl Verdict {
    fn begin(name: &'static str) -> Verdict {
        Verdict {
            name,
            passed: false,
            start: Instant::now(),
        }
    }
    fn pass(mut self) {
        self.passed = true;
    }
}

impl Drop for Verdict {
    fn drop(&mut self) {
        println!(
            "[{}] {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.start.elapsed().as_secs_f64()
        );
    }
}

fn karate() -> Graph {
    load_graph(
        concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/karate.mtx"),
        GraphFormat::Auto,
    )
    .unwrap()
}

/// A deterministic mix of small generator graphs.
fn mixed_small_graph(seed: u64, max_n: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_n);
    match seed % 3 {
        0 => gen_erdos_renyi(n, 0.1 + 0.4 * rng.random::<f64>(), seed).unwrap(),
        1 => {
            let m_attach = rng.random_range(1..n.min(6));
            gen_barabasi_albert(n, m_attach, seed).unwrap()
        }
        _ => {
            let w_max = (2.0 * n as f64).sqrt().max(1.0);
            let w = make_power_law_weights(n, 2.5, 1.0, w_max, seed).unwrap();
            gen_chung_lu(&w, seed).unwrap()
        }
    }
}

#[test]
fn criterion_1_full_rank_tsvd_exactness() {
    let verdict = Verdict::begin("criterion 1: full-rank TSVD reconstructs 50 graphs exactly");
    let start = Instant::now();
    for seed in 0..50u64 {
        let g = mixed_small_graph(seed, 50);
        let a = DenseAdjacency::from_graph(&g).unwrap();
        let e = tsvd_embed(&a, g.n()).unwrap();
        let back = binarize(&reconstruct(&e), DEFAULT_BINARIZE_THRESHOLD).unwrap();
        let report = reconstruction_report(&a, &back).unwrap();
        assert_eq!(
            report.mismatches, 0,
            "seed {seed}: n={} m={} mismatches={}",
            g.n(),
            g.m(),
            report.mismatches
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_2_lpca_gradient_matches_finite_differences() {
    let verdict = Verdict::begin("criterion 2: LPCA gradient matches central differences");
    let start = Instant::now();
    let h = 1e-5;
    for instance in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + instance);
        let n = rng.random_range(2..=10usize);
        let k = rng.random_range(1..=4usize.min(n));
        let g = gen_erdos_renyi(n, 0.4, instance).unwrap();
        let at = ShiftedAdjacency::from_dense(&DenseAdjacency::from_graph(&g).unwrap());
        let mut x = Array2::from_shape_fn((n, k), |_| rng.random::<f64>() * 2.0 - 1.0);
        let mut y = Array2::from_shape_fn((n, k), |_| rng.random::<f64>() * 2.0 - 1.0);
        let (gx, gy) = lpca_gradient(&x, &y, &at).unwrap();

        for r in 0..n {
            for c in 0..k {
                let orig = x[(r, c)];
                x[(r, c)] = orig + h;
                let up = lpca_loss(&x, &y, &at).unwrap();
                x[(r, c)] = orig - h;
                let down = lpca_loss(&x, &y, &at).unwrap();
                x[(r, c)] = orig;
                let fd = (up - down) / (2.0 * h);
                let rel = (gx[(r, c)] - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-5, "instance {instance} X[{r}][{c}]: rel {rel:.2e}");

                let orig = y[(r, c)];
                y[(r, c)] = orig + h;
                let up = lpca_loss(&x, &y, &at).unwrap();
                y[(r, c)] = orig - h;
                let down = lpca_loss(&x, &y, &at).unwrap();
                y[(r, c)] = orig;
                let fd = (up - down) / (2.0 * h);
                let rel = (gy[(r, c)] - fd).abs() / fd.abs().max(1e-8);
                assert!(rel < 1e-5, "instance {instance} Y[{r}][{c}]: rel {rel:.2e}");
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_3_karate_embeds_exactly_at_rank_16() {
    let verdict = Verdict::begin("criterion 3: karate graph exact at LPCA rank 16 (2 of 3 seeds)");
    let start = Instant::now();
    let g = karate();
    assert_eq!((g.n(), g.m()), (34, 78));
    let a = DenseAdjacency::from_graph(&g).unwrap();
    let mut exact = 0;
    for seed in 0..3u64 {
        let e = lpca_embed(&a, 16, seed, &LpcaOptions::default()).unwrap();
        assert!(e.iterations_used <= 100);
        let back = binarize(&reconstruct(&e), DEFAULT_BINARIZE_THRESHOLD).unwrap();
        if reconstruction_report(&a, &back).unwrap().exact {
            exact += 1;
        }
    }
    assert!(exact >= 2, "only {exact} of 3 seeds reconstructed exactly");
    assert!(start.elapsed().as_secs_f64() < 60.0, "runtime budget");
    verdict.pass();
}

// --- brute-force oracles for criterion 4 -----------------------------------

fn oracle_triangles(g: &Graph) -> u64 {
    let n = g.n();
    let mut count = 0;
    for a in 0..n {
        for b in (a + 1)..n {
            if !g.has_edge(a, b) {
                continue;
            }
            for c in (b + 1)..n {
                if g.has_edge(a, c) && g.has_edge(b, c) {
                    count += 1;
                }
            }
        }
    }
    count
}

fn oracle_max_kcore(g: &Graph) -> usize {
    let max_degree = (0..g.n()).map(|u| g.degree(u)).max().unwrap_or(0);
    let mut best = 0;
    for k in 0..=max_degree {
        // Repeatedly delete nodes of degree < k; non-empty remainder means
        // the k-core exists.
        let mut alive: Vec<bool> = vec![true; g.n()];
        loop {
            let mut changed = false;
            for u in 0..g.n() {
                if !alive[u] {
                    continue;
                }
                let degree = g.neighbors(u).iter().filter(|&&v| alive[v]).count();
                if degree < k {
                    alive[u] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if alive.iter().any(|&a| a) {
            best = k;
        }
    }
    best
}

fn oracle_avg_clustering(g: &Graph) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    for v in 0..g.n() {
        let neighbors = g.neighbors(v);
        let d = neighbors.len();
        if d < 2 {
            continue;
        }
        let mut closed = 0usize;
        for i in 0..d {
            for j in (i + 1)..d {
                if g.has_edge(neighbors[i], neighbors[j]) {
                    closed += 1;
                }
            }
        }
        total += 2.0 * closed as f64 / (d * (d - 1)) as f64;
    }
    total / g.n() as f64
}

fn oracle_centrality(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if g.has_edge(i, j) {
            1.0f64
        } else {
            0.0
        }
    });
    let eigen = nalgebra::SymmetricEigen::new(a);
    let top = eigen
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    let column = eigen.eigenvectors.column(top);
    let norm = column.iter().map(|v| v * v).sum::<f64>().sqrt();
    column.iter().map(|v| v.abs() / norm).collect()
}

#[test]
fn criterion_4_feature_oracles() {
    let verdict = Verdict::begin("criterion 4: features equal brute-force oracles on 200 graphs");
    let start = Instant::now();
    let mut connected_checked = 0;
    for seed in 0..200u64 {
        let g = mixed_small_graph(seed * 7 + 3, 60);
        assert_eq!(
            features::triangle_count(&g),
            oracle_triangles(&g),
            "triangles at seed {seed}"
        );
        assert_eq!(
            features::max_kcore(&g),
            oracle_max_kcore(&g),
            "k-core at seed {seed}"
        );
        let clustering = features::avg_clustering(&g);
        let clustering_oracle = oracle_avg_clustering(&g);
        assert!(
            (clustering - clustering_oracle).abs() < 1e-12,
            "clustering at seed {seed}: {clustering} vs {clustering_oracle}"
        );

        if g.m() > 0 && g.is_connected() {
            connected_checked += 1;
            let mine =
                features::eigenvector_centrality(&g, features::CentralityOptions::default())
                    .unwrap();
            let reference = oracle_centrality(&g);
            for (v, (got, want)) in mine.values.iter().zip(&reference).enumerate() {
                assert!(
                    (got - want).abs() < 1e-6,
                    "centrality at seed {seed} node {v}: {got} vs {want}"
                );
            }
        }
    }
    assert!(connected_checked > 50, "want a healthy connected sample");
    assert!(start.elapsed().as_secs_f64() < 120.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_5_rank_sweep_trend() {
    let verdict =
        Verdict::begin("criterion 5: LPCA >= TSVD per rank and near-monotone rank response");
    let start = Instant::now();
    let config = lownet::bench::ExperimentConfig {
        manifest: lownet::bench::default_manifest(0),
        methods: vec![Method::Tsvd, Method::Lpca],
        rank_ladder: vec![16, 32, 64],
        include_baseline: false,
        seed: 0,
        ..lownet::bench::ExperimentConfig::default()
    };
    let report = lownet::bench::run_pipeline(&config).unwrap();
    let f1 = |method: Method, rank: usize| -> f64 {
        report
            .cells
            .iter()
            .find(|c| c.method == method && c.rank == rank)
            .unwrap()
            .cv
            .mean_f1
    };
    for &rank in &[16usize, 32, 64] {
        let lpca = f1(Method::Lpca, rank);
        let tsvd = f1(Method::Tsvd, rank);
        println!("  rank {rank}: lpca {lpca:.4} vs tsvd {tsvd:.4}");
        assert!(
            lpca >= tsvd,
            "LPCA ({lpca:.4}) must not trail TSVD ({tsvd:.4}) at rank {rank}"
        );
    }
    for &method in &[Method::Tsvd, Method::Lpca] {
        let low = f1(method, 16);
        let high = f1(method, 64);
        assert!(
            high >= low - 0.05,
            "{method} at rank 64 ({high:.4}) fell more than 0.05 below rank 16 ({low:.4})"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 1800.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_6_lpca_slower_than_tsvd() {
    let verdict = Verdict::begin("criterion 6: LPCA wall time >= 2x TSVD on a BA graph");
    let start = Instant::now();
    // m_attach 36 gives an average degree of about 70 at n = 1000.
    let g = gen_barabasi_albert(1000, 36, 7).unwrap();
    // The timing contract pins the full 100-iteration budget, so the
    // gradient-tolerance early exit is disabled.
    let lpca_opts = LpcaOptions {
        max_iters: 100,
        grad_tol: 0.0,
    };
    for &rank in &[16usize, 32, 64] {
        let tsvd =
            lownet::bench::time_embedding(&g, Method::Tsvd, rank, 1, 0, &lpca_opts).unwrap();
        let lpca =
            lownet::bench::time_embedding(&g, Method::Lpca, rank, 1, 0, &lpca_opts).unwrap();
        let ratio = lpca.median_seconds / tsvd.median_seconds;
        println!(
            "  rank {rank}: tsvd {:.3}s, lpca {:.3}s, ratio {ratio:.1}x",
            tsvd.median_seconds, lpca.median_seconds
        );
        assert!(
            ratio >= 2.0,
            "rank {rank}: LPCA/TSVD ratio {ratio:.2} below 2x"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 300.0, "runtime budget");
    verdict.pass();
}

fn one_hot_dataset(per_class: usize, n_classes: usize) -> LabeledDataset {
    let rows = per_class * n_classes;
    let mut features = Array2::zeros((rows, n_classes));
    let mut labels = Vec::with_capacity(rows);
    for c in 0..n_classes {
        for i in 0..per_class {
            features[(c * per_class + i, c)] = 1.0;
            labels.push(c);
        }
    }
    let names = (0..n_classes).map(|c| format!("class{c}")).collect();
    LabeledDataset::new(features, labels, names).unwrap()
}

#[test]
fn criterion_7_classifier_sanity() {
    let verdict = Verdict::begin("criterion 7: perfect features score 1.0, shuffled labels near chance");
    let start = Instant::now();
    let dataset = one_hot_dataset(20, 9);
    for spec in [
        ClassifierSpec::Svm { c: 1.0, epochs: 200 },
        ClassifierSpec::Knn { k_neighbors: 5 },
    ] {
        let report = cross_validate(&dataset, &spec, 10, 3).unwrap();
        assert_eq!(report.folds, 10);
        assert_eq!(report.mean_f1, 1.0, "{spec:?} on one-hot features");
    }

    // Shuffling labels against the features destroys the signal; across 20
    // seeds the mean macro-F1 must stay near the 1/9 chance level.
    use rand::seq::SliceRandom;
    let mut total = 0.0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(40 + seed);
        let base = one_hot_dataset(20, 9);
        let mut labels = base.labels().to_vec();
        labels.shuffle(&mut rng);
        let shuffled = LabeledDataset::new(
            base.features().to_owned(),
            labels,
            base.class_names().to_vec(),
        )
        .unwrap();
        let report = cross_validate(
            &shuffled,
            &ClassifierSpec::Svm { c: 1.0, epochs: 200 },
            10,
            seed,
        )
        .unwrap();
        total += report.mean_f1;
    }
    let mean = total / 20.0;
    println!("  label-shuffled mean macro-F1 over 20 seeds: {mean:.4}");
    assert!(mean < 0.25, "shuffled-label score {mean:.4} not near chance");
    assert!(start.elapsed().as_secs_f64() < 300.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_8_pipeline_determinism() {
    let verdict = Verdict::begin("criterion 8: identical config gives byte-identical reports");
    let start = Instant::now();
    let manifest = lownet::bench::CorpusManifest {
        classes: vec![
            lownet::bench::CorpusClass {
                name: "sparse".into(),
                sources: (0..4)
                    .map(|i| lownet::bench::GraphSource::Generator {
                        spec: lownet::generators::GeneratorSpec::ErdosRenyi {
                            n: 40,
                            p: 0.05,
                            seed: i,
                        },
                    })
                    .collect(),
            },
            lownet::bench::CorpusClass {
                name: "dense".into(),
                sources: (0..4)
                    .map(|i| lownet::bench::GraphSource::Generator {
                        spec: lownet::generators::GeneratorSpec::ErdosRenyi {
                            n: 40,
                            p: 0.3,
                            seed: 50 + i,
                        },
                    })
                    .collect(),
            },
            lownet::bench::CorpusClass {
                name: "hubs".into(),
                sources: (0..4)
                    .map(|i| lownet::bench::GraphSource::Structured {
                        spec: lownet::bench::StructuredSpec::StarsWithNoise {
                            n: 40,
                            hubs: 3,
                            noise_p: 0.02,
                            seed: 90 + i,
                        },
                    })
                    .collect(),
            },
        ],
        corpus_seed: 1,
        prng: lownet::PRNG_ALGORITHM.into(),
    };
    let config = lownet::bench::ExperimentConfig {
        manifest,
        methods: vec![Method::Tsvd, Method::Lpca],
        rank_ladder: vec![4, 8],
        cv_folds: 4,
        threads: 2,
        seed: 11,
        min_rank: Some(lownet::bench::MinRankConfig {
            ladder: vec![5, 16],
            seeds_per_rank: 1,
            graphs_per_class: 1,
            ..lownet::bench::MinRankConfig::default()
        }),
        ..lownet::bench::ExperimentConfig::default()
    };
    let a = lownet::bench::run_pipeline(&config).unwrap();
    let b = lownet::bench::run_pipeline(&config).unwrap();
    assert_eq!(
        a.deterministic_json(),
        b.deterministic_json(),
        "non-timing report fields must serialize identically"
    );
    assert!(start.elapsed().as_secs_f64() < 300.0, "runtime budget");
    verdict.pass();
}

#[test]
fn criterion_9_generator_statistics() {
    let verdict = Verdict::begin("criterion 9: generator statistics match their laws");
    let start = Instant::now();

    // ER: the mean of 200 seeded edge counts against the binomial law at
    // 4 sigma of the sample mean.
    let (n, p) = (1000usize, 0.0752f64);
    let pairs = (n * (n - 1) / 2) as f64;
    let mut total_edges = 0usize;
    for seed in 0..200u64 {
        total_edges += gen_erdos_renyi(n, p, seed).unwrap().m();
    }
    let sample_mean = total_edges as f64 / 200.0;
    let mean = pairs * p;
    let sigma_mean = (pairs * p * (1.0 - p)).sqrt() / 200.0f64.sqrt();
    println!(
        "  er mean edges {sample_mean:.1} vs {mean:.1} (sigma of mean {sigma_mean:.1})"
    );
    assert!(
        (sample_mean - mean).abs() < 4.0 * sigma_mean,
        "ER sample mean {sample_mean:.1} vs binomial mean {mean:.1}"
    );

    // BA: closed-form edge count, exactly.
    for (n, m_attach, seed) in [(1000usize, 36usize, 0u64), (500, 7, 1), (50, 1, 2)] {
        let g = gen_barabasi_albert(n, m_attach, seed).unwrap();
        let expected = m_attach * (m_attach + 1) / 2 + (n - m_attach - 1) * m_attach;
        assert_eq!(g.m(), expected, "BA({n}, {m_attach})");
        assert!(g.is_connected());
    }

    // CL: realized average degree within 10% of the expected-degree mean
    // over 10 seeds at n = 5000.
    let n = 5000usize;
    let mut ratio_total = 0.0;
    for seed in 0..10u64 {
        let w = make_power_law_weights(n, 2.5, 2.0, 70.0, seed).unwrap();
        let g = gen_chung_lu(&w, 777 + seed).unwrap();
        let realized = 2.0 * g.m() as f64 / n as f64;
        let expected = w.iter().sum::<f64>() / n as f64;
        ratio_total += realized / expected;
    }
    let mean_ratio = ratio_total / 10.0;
    println!("  cl realized/expected degree ratio {mean_ratio:.4}");
    assert!(
        (mean_ratio - 1.0).abs() < 0.10,
        "CL degree ratio {mean_ratio:.4} outside 10%"
    );
    assert!(start.elapsed().as_secs_f64() < 300.0, "runtime budget");
    verdict.pass();
}
