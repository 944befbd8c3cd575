//! Materializes an [`ExperimentReport`] as CSV tables and a JSON bundle.
//!
//! Emission is deterministic: the same report always produces byte-identical
//! files, and every file carries the config hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bench::pipeline::ExperimentReport;
use crate::error::{Error, Result};

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn stamp(report: &ExperimentReport) -> String {
    format!("# config={}\n", report.config_hash)
}

fn confusion_csv(report: &ExperimentReport, confusion: &[Vec<usize>]) -> String {
    let mut out = stamp(report);
    out.push_str("class");
    for name in &report.class_names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (row, counts) in confusion.iter().enumerate() {
        out.push_str(&report.class_names[row]);
        for count in counts {
            let _ = write!(out, ",{count}");
        }
        out.push('\n');
    }
    out
}

/// Writes the rank-sweep, timing, min-rank, and per-cell confusion CSVs plus
/// the full JSON bundle into `out_dir`. Returns the created paths.
pub fn emit_reports(report: &ExperimentReport, out_dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    // Rank sweep: one row per (method, rank) cell.
    let mut sweep = stamp(report);
    sweep.push_str("method,rank,mean_macro_f1,mean_weighted_f1\n");
    for cell in &report.cells {
        let _ = writeln!(
            sweep,
            "{},{},{},{}",
            cell.method, cell.rank, cell.cv.mean_f1, cell.cv.mean_f1_weighted
        );
    }
    written.push(write_file(dir, "rank_sweep.csv", &sweep)?);

    // Per-graph timings and reconstruction quality.
    let mut timing = stamp(report);
    timing.push_str("class,graph,n,m,method,rank,embed_seconds,feature_seconds,mismatch_rate\n");
    for cell in &report.cells {
        for record in &cell.per_graph {
            let graph = &report.graphs[record.graph];
            let _ = writeln!(
                timing,
                "{},{},{},{},{},{},{},{},{}",
                report.class_names[graph.class],
                graph.name,
                graph.n,
                graph.m,
                cell.method,
                cell.rank,
                record.embed_seconds,
                record.feature_seconds,
                record.mismatch_rate
            );
        }
    }
    written.push(write_file(dir, "timing.csv", &timing)?);

    if !report.min_rank.is_empty() {
        let mut min_rank = stamp(report);
        min_rank.push_str("class,graph,n,avg_degree,min_exact_rank\n");
        for entry in &report.min_rank {
            let _ = writeln!(
                min_rank,
                "{},{},{},{},{}",
                entry.class_name,
                entry.graph_name,
                entry.n,
                entry.avg_degree,
                entry
                    .search
                    .found
                    .map(|r| r.to_string())
                    .unwrap_or_else(|| "none".to_string())
            );
        }
        written.push(write_file(dir, "min_rank.csv", &min_rank)?);
    }

    for cell in &report.cells {
        let name = format!("confusion_{}_{}.csv", cell.method, cell.rank);
        written.push(write_file(dir, &name, &confusion_csv(report, &cell.cv.confusion))?);
    }
    if let Some(baseline) = &report.baseline {
        written.push(write_file(
            dir,
            "confusion_baseline.csv",
            &confusion_csv(report, &baseline.cv.confusion),
        )?);
    }

    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    written.push(write_file(dir, "report.json", &json)?);
    Ok(written)
}
