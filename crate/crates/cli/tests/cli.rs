//! End-to-end tests of the `lownet` binary: subcommand behavior and exit
//! codes.

use std::path::Path;
use std::process::{Command, Output};

fn lownet(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lownet"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

#[test]
fn generate_features_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = lownet(
        &[
            "generate", "er", "--nodes", "60", "--prob", "0.2", "--seed", "3", "-o", "er.edges",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    assert!(dir.path().join("er.edges").exists());

    let out = lownet(&["features", "er.edges"], dir.path());
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["num_nodes"], 60);

    let out = lownet(&["features", "er.edges", "--csv"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("num_nodes,num_edges,density"));
    assert_eq!(text.trim().lines().count(), 2);
}

#[test]
fn embed_reconstruct_cycle_recovers_graph() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lownet(
        &[
            "generate", "ba", "--nodes", "40", "--attach", "2", "--seed", "5", "-o", "ba.edges",
        ],
        dir.path(),
    )
    .status
    .success());
    assert!(lownet(
        &[
            "embed", "ba.edges", "--method", "lpca", "--rank", "16", "--seed", "1", "-o",
            "ba.lneb",
        ],
        dir.path(),
    )
    .status
    .success());
    let out = lownet(
        &[
            "reconstruct", "ba.lneb", "-o", "ba2.edges", "--compare", "ba.edges",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["exact"], true, "{report}");
}

#[test]
fn min_rank_reports_ladder_search() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lownet(
        &["generate", "er", "--nodes", "20", "--prob", "0.3", "--seed", "2", "-o", "g.edges"],
        dir.path(),
    )
    .status
    .success());
    let out = lownet(
        &[
            "min-rank", "g.edges", "--method", "lpca", "--ladder", "5,10,20", "--seeds-per-rank",
            "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(json["found"].is_number(), "{json}");
}

#[test]
fn classify_runs_cv_and_holdout_on_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("f1,f2,class\n");
    for i in 0..20 {
        csv.push_str(&format!("{}.0,0.0,zero\n", i % 3));
        csv.push_str(&format!("{}.0,9.0,nine\n", i % 3));
    }
    std::fs::write(dir.path().join("features.csv"), csv).unwrap();

    let out = lownet(
        &[
            "classify", "features.csv", "--folds", "5", "--seed", "4", "--out-dir", "cv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{out:?}");
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["mean_f1"], 1.0, "{report}");
    for file in ["report.json", "per_fold.csv", "confusion.csv"] {
        assert!(dir.path().join("cv").join(file).exists(), "{file}");
    }

    let out = lownet(
        &["classify", "features.csv", "--holdout", "0.2", "--classifier", "knn"],
        dir.path(),
    );
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["f1"], 1.0, "{report}");
}

#[test]
fn pipeline_runs_small_config_and_emits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = lownet(&["pipeline", "--emit-default-config"], dir.path());
    assert!(out.status.success());
    let mut config: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();

    // Shrink the default config to a fast smoke run.
    config["manifest"]["classes"] = serde_json::json!([
        {
            "name": "a",
            "sources": (0..3).map(|i| serde_json::json!({
                "type": "generator",
                "spec": {"model": "erdos-renyi", "n": 30, "p": 0.08, "seed": i}
            })).collect::<Vec<_>>(),
        },
        {
            "name": "b",
            "sources": (0..3).map(|i| serde_json::json!({
                "type": "generator",
                "spec": {"model": "erdos-renyi", "n": 30, "p": 0.4, "seed": 10 + i}
            })).collect::<Vec<_>>(),
        }
    ]);
    config["rank_ladder"] = serde_json::json!([4]);
    config["cv_folds"] = serde_json::json!(3);
    std::fs::write(
        dir.path().join("config.json"),
        serde_json::to_string_pretty(&config).unwrap(),
    )
    .unwrap();

    let out = lownet(
        &["pipeline", "--config", "config.json", "--out", "report"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["rank_sweep.csv", "timing.csv", "report.json", "confusion_tsvd_4.csv"] {
        assert!(dir.path().join("report").join(file).exists(), "{file}");
    }
}

#[test]
fn bench_time_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lownet(
        &["generate", "er", "--nodes", "50", "--prob", "0.2", "-o", "g.edges"],
        dir.path(),
    )
    .status
    .success());
    let out = lownet(
        &[
            "bench-time", "g.edges", "--methods", "tsvd,lpca", "--ranks", "4,8", "--repeats", "2",
        ],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("method,rank,repeats,median_seconds,threads"));
    assert_eq!(text.trim().lines().count(), 5);
}

#[test]
fn exit_codes_by_failure_class() {
    let dir = tempfile::tempdir().unwrap();

    // Usage error (clap): unknown flag.
    let out = lownet(&["generate", "er", "--bogus"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // Usage error (domain): invalid probability.
    let out = lownet(
        &["generate", "er", "--nodes", "10", "--prob", "1.5", "-o", "x.edges"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1), "{out:?}");

    // Data error: missing file.
    let out = lownet(&["features", "missing.edges"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{out:?}");

    // Data error: malformed graph file with line number in the message.
    std::fs::write(dir.path().join("bad.edges"), "0 1\nnot numbers\n").unwrap();
    let out = lownet(&["features", "bad.edges"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2"));

    // Numerical error: eigenvector centrality of an edgeless graph.
    std::fs::write(dir.path().join("empty.edges"), "# nodes=5\n").unwrap();
    let out = lownet(
        &["embed", "empty.edges", "--method", "tsvd", "--rank", "10", "-o", "e.lneb"],
        dir.path(),
    );
    // Rank above n is a usage error; rank within bounds on the empty graph
    // embeds fine (zero spectrum), so check the rank validation path here.
    assert_eq!(out.status.code(), Some(1), "{out:?}");
}

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert!(lownet(&["--help"], dir.path()).status.success());
    assert!(lownet(&["--version"], dir.path()).status.success());
    assert!(lownet(&["embed", "--help"], dir.path()).status.success());
}
