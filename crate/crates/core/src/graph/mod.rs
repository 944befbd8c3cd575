//! Simple undirected graphs with CSR adjacency.
//!
//! [`Graph`] is the unit that flows through every stage of the toolkit:
//! generators and loaders produce it, feature extraction and embedding
//! consume it. It is immutable after construction and cheap to share.

mod dense;
mod io;

pub use dense::{DenseAdjacency, DEFAULT_DENSE_CAP};
pub use io::{load_graph, load_graph_counted, save_graph, GraphFormat};

use crate::error::{Error, Result};

/// Counts of entries dropped while normalizing raw edge input.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanupStats {
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

impl CleanupStats {
    pub fn is_clean(&self) -> bool {
        self.self_loops_dropped == 0 && self.duplicates_dropped == 0
    }
}

/// An immutable simple undirected graph.
///
/// Invariants, enforced at construction:
/// - no self-loops, no duplicate edges
/// - `edges` holds pairs `(u, v)` with `u < v`, sorted lexicographically
/// - neighbor lists are sorted ascending and symmetric
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    // CSR adjacency derived from `edges`.
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` nodes from arbitrary raw pairs. Self-loops are
    /// dropped, duplicates (including reversed duplicates) collapsed.
    pub fn from_edges(n: usize, raw: impl IntoIterator<Item = (usize, usize)>) -> Result<Graph> {
        Ok(Self::from_edges_counted(n, raw)?.0)
    }

    /// Like [`Graph::from_edges`] but also reports how much cleanup happened,
    /// so loaders can warn about dirty input.
    pub fn from_edges_counted(
        n: usize,
        raw: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Graph, CleanupStats)> {
        let mut stats = CleanupStats::default();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (a, b) in raw {
            if a >= n || b >= n {
                return Err(Error::InvalidParam {
                    name: "edges",
                    msg: format!("edge ({a}, {b}) references a node >= n = {n}"),
                });
            }
            if a == b {
                stats.self_loops_dropped += 1;
                continue;
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        let before = edges.len();
        edges.dedup();
        stats.duplicates_dropped = before - edges.len();

        let mut degrees = vec![0usize; n];
        for &(u, v) in &edges {
            degrees[u] += 1;
            degrees[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0usize);
        for d in &degrees {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut neighbors = vec![0usize; 2 * edges.len()];
        let mut cursor = offsets[..n].to_vec();
        for &(u, v) in &edges {
            neighbors[cursor[u]] = v;
            cursor[u] += 1;
            neighbors[cursor[v]] = u;
            cursor[v] += 1;
        }
        // Neighbor lists come out sorted because edges are sorted by (u, v)
        // and smaller partners are inserted first, but the v-side insertions
        // interleave, so sort each list to be safe.
        for u in 0..n {
            neighbors[offsets[u]..offsets[u + 1]].sort_unstable();
        }

        Ok((
            Graph {
                n,
                edges,
                offsets,
                neighbors,
            },
            stats,
        ))
    }

    /// Graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Graph {
        Graph {
            n,
            edges: Vec::new(),
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Sorted, deduplicated edge list with `u < v` per pair.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `u`.
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.neighbors[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && u < self.n && v < self.n && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Connected components as sorted node lists, ordered by first node.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        let mut queue = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.clear();
            queue.push(start);
            let mut component = vec![start];
            while let Some(u) = queue.pop() {
                for &v in self.neighbors(u) {
                    if !seen[v] {
                        seen[v] = true;
                        component.push(v);
                        queue.push(v);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Nodes of the largest connected component (ties broken by the earliest
    /// component found, i.e. the one with the smallest node id).
    pub fn largest_component(&self) -> Vec<usize> {
        let mut best: Vec<usize> = Vec::new();
        for component in self.connected_components() {
            if component.len() > best.len() {
                best = component;
            }
        }
        best
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.largest_component().len() == self.n
    }
}
