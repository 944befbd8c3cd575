//! Graph file ingestion and export.
//!
//! Two formats are supported:
//!
//! - **Edge list**: one edge per line, two integer tokens separated by
//!   whitespace or commas, optional third token (weight) ignored. Comment
//!   lines start with `#` or `%`. A comment of the form `# nodes=N` carries
//!   an explicit node count so isolated nodes survive a round-trip.
//! - **MatrixMarket**: `coordinate` format with `pattern`/`real`/`integer`
//!   field and `symmetric`/`general` symmetry, 1-based indices.
//!
//! Loaded graphs are always simple and undirected: self-loops are dropped,
//! parallel and reversed duplicates collapsed, directed arcs symmetrized.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{CleanupStats, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFormat {
    EdgeList,
    MatrixMarket,
    /// Pick by file extension (`.mtx`, `.mm`), falling back to sniffing the
    /// `%%MatrixMarket` banner.
    #[default]
    Auto,
}

/// Loads a graph from `path`. See the module docs for format details.
pub fn load_graph(path: impl AsRef<Path>, format: GraphFormat) -> Result<Graph> {
    Ok(load_graph_counted(path, format)?.0)
}

/// Like [`load_graph`] but also reports how many self-loops and duplicate
/// edges were dropped, so callers can surface a warning.
pub fn load_graph_counted(
    path: impl AsRef<Path>,
    format: GraphFormat,
) -> Result<(Graph, CleanupStats)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    match resolve_format(path, &text, format) {
        GraphFormat::MatrixMarket => parse_matrix_market(path, &text),
        _ => parse_edge_list(path, &text),
    }
}

fn resolve_format(path: &Path, text: &str, format: GraphFormat) -> GraphFormat {
    match format {
        GraphFormat::Auto => {
            let by_ext = path
                .extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("mtx") || e.eq_ignore_ascii_case("mm"))
                .unwrap_or(false);
            if by_ext || text.trim_start().starts_with("%%MatrixMarket") {
                GraphFormat::MatrixMarket
            } else {
                GraphFormat::EdgeList
            }
        }
        other => other,
    }
}

fn split_tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
}

fn parse_node_id(path: &Path, line_no: usize, token: &str) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::Parse {
        path: path.to_path_buf(),
        line: line_no,
        msg: format!("expected a non-negative integer node id, got `{token}`"),
    })
}

fn parse_edge_list(path: &Path, text: &str) -> Result<(Graph, CleanupStats)> {
    let mut declared_n: Option<usize> = None;
    let mut raw_edges: Vec<(usize, usize)> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#').or_else(|| line.strip_prefix('%')) {
            let comment = comment.trim();
            if let Some(value) = comment.strip_prefix("nodes=") {
                declared_n = Some(parse_node_id(path, line_no, value.trim())?);
            }
            continue;
        }
        let mut tokens = split_tokens(line);
        let (a, b) = match (tokens.next(), tokens.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: "expected two node ids per edge line".into(),
                })
            }
        };
        let a = parse_node_id(path, line_no, a)?;
        let b = parse_node_id(path, line_no, b)?;
        if let Some(n) = declared_n {
            if a >= n || b >= n {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: line_no,
                    msg: format!("node id out of declared range 0..{n}"),
                });
            }
        }
        raw_edges.push((a, b));
    }

    match declared_n {
        Some(n) => Graph::from_edges_counted(n, raw_edges),
        None => {
            if raw_edges.is_empty() {
                return Err(Error::EmptyFile {
                    path: path.to_path_buf(),
                });
            }
            // No declared node count: remap ids to 0..n-1 in order of first
            // appearance; n is the number of distinct ids seen.
            let mut remap: HashMap<usize, usize> = HashMap::new();
            let mut next = 0usize;
            let mut mapped = Vec::with_capacity(raw_edges.len());
            for (a, b) in raw_edges {
                let a = *remap.entry(a).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                });
                let b = *remap.entry(b).or_insert_with(|| {
                    let id = next;
                    next += 1;
                    id
                });
                mapped.push((a, b));
            }
            Graph::from_edges_counted(next, mapped)
        }
    }
}

fn parse_matrix_market(path: &Path, text: &str) -> Result<(Graph, CleanupStats)> {
    let parse_err = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };

    let mut lines = text.lines().enumerate();
    let (header_no, header) = loop {
        match lines.next() {
            Some((idx, line)) if !line.trim().is_empty() => break (idx + 1, line.trim()),
            Some(_) => continue,
            None => {
                return Err(Error::EmptyFile {
                    path: path.to_path_buf(),
                })
            }
        }
    };

    let tokens: Vec<String> = header
        .split_whitespace()
        .map(|t| t.to_ascii_lowercase())
        .collect();
    if tokens.len() < 5 || !tokens[0].starts_with("%%matrixmarket") {
        return Err(parse_err(header_no, "missing %%MatrixMarket header".into()));
    }
    if tokens[1] != "matrix" || tokens[2] != "coordinate" {
        return Err(parse_err(
            header_no,
            format!("unsupported MatrixMarket class `{} {}`", tokens[1], tokens[2]),
        ));
    }
    if !matches!(tokens[3].as_str(), "pattern" | "real" | "integer") {
        return Err(parse_err(
            header_no,
            format!("unsupported field `{}`", tokens[3]),
        ));
    }
    if !matches!(tokens[4].as_str(), "symmetric" | "general") {
        return Err(parse_err(
            header_no,
            format!("unsupported symmetry `{}`", tokens[4]),
        ));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut raw_edges: Vec<(usize, usize)> = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut tokens = split_tokens(line);
        if size.is_none() {
            let rows = parse_node_id(path, line_no, tokens.next().unwrap_or(""))?;
            let cols = parse_node_id(path, line_no, tokens.next().unwrap_or(""))?;
            let nnz = parse_node_id(path, line_no, tokens.next().unwrap_or(""))?;
            if rows != cols {
                return Err(parse_err(
                    line_no,
                    format!("adjacency matrix must be square, got {rows}x{cols}"),
                ));
            }
            size = Some((rows, cols, nnz));
            continue;
        }
        let (n, _, _) = size.unwrap();
        let i = parse_node_id(path, line_no, tokens.next().unwrap_or(""))?;
        let j = parse_node_id(path, line_no, tokens.next().unwrap_or(""))?;
        if i < 1 || j < 1 || i > n || j > n {
            return Err(parse_err(
                line_no,
                format!("index ({i}, {j}) out of 1..={n}"),
            ));
        }
        raw_edges.push((i - 1, j - 1));
    }

    let (n, _, nnz) = size.ok_or_else(|| Error::EmptyFile {
        path: path.to_path_buf(),
    })?;
    if raw_edges.len() != nnz {
        return Err(parse_err(
            0,
            format!("header declares {} entries, found {}", nnz, raw_edges.len()),
        ));
    }
    Graph::from_edges_counted(n, raw_edges)
}

/// Saves `g` to `path`. Round-trip identity holds for both concrete formats:
/// `load_graph(save_graph(g)) == g`, node count included.
pub fn save_graph(g: &Graph, path: impl AsRef<Path>, format: GraphFormat) -> Result<()> {
    let path = path.as_ref();
    let format = match format {
        GraphFormat::Auto => resolve_format(path, "", GraphFormat::Auto),
        other => other,
    };
    let mut out = String::new();
    match format {
        GraphFormat::EdgeList => {
            out.push_str(&format!("# nodes={}\n", g.n()));
            for &(u, v) in g.edges() {
                out.push_str(&format!("{u} {v}\n"));
            }
        }
        GraphFormat::MatrixMarket => {
            out.push_str("%%MatrixMarket matrix coordinate pattern symmetric\n");
            out.push_str(&format!("{} {} {}\n", g.n(), g.n(), g.m()));
            // Symmetric coordinate entries live in the lower triangle.
            for &(u, v) in g.edges() {
                out.push_str(&format!("{} {}\n", v + 1, u + 1));
            }
        }
        GraphFormat::Auto => unreachable!(),
    }
    let mut file = fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    file.write_all(out.as_bytes()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
