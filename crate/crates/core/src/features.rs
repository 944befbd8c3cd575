//! Structural graph attributes used as the classifier input representation.
//!
//! Every operation is a pure function of an immutable [`Graph`] and is
//! therefore safe to call concurrently.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// The nine per-graph attributes, in their canonical column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub num_nodes: usize,
    pub num_edges: usize,
    pub density: f64,
    pub max_degree: usize,
    pub avg_degree: f64,
    pub max_kcore: usize,
    pub avg_clustering: f64,
    pub num_triangles: u64,
    pub avg_eigenvector_centrality: f64,
}

impl FeatureVector {
    pub const LEN: usize = 9;

    pub const CSV_HEADER: &'static str = "num_nodes,num_edges,density,max_degree,avg_degree,\
         max_kcore,avg_clustering,num_triangles,avg_eigenvector_centrality";

    /// The attributes as a row in [`Self::CSV_HEADER`] column order.
    pub fn to_array(&self) -> [f64; Self::LEN] {
        [
            self.num_nodes as f64,
            self.num_edges as f64,
            self.density,
            self.max_degree as f64,
            self.avg_degree,
            self.max_kcore as f64,
            self.avg_clustering,
            self.num_triangles as f64,
            self.avg_eigenvector_centrality,
        ]
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.num_nodes,
            self.num_edges,
            self.density,
            self.max_degree,
            self.avg_degree,
            self.max_kcore,
            self.avg_clustering,
            self.num_triangles,
            self.avg_eigenvector_centrality
        )
    }
}

/// Edge density m / C(n, 2), defined as 0 for n < 2.
pub fn density(g: &Graph) -> f64 {
    if g.n() < 2 {
        return 0.0;
    }
    let pairs = (g.n() * (g.n() - 1) / 2) as f64;
    g.m() as f64 / pairs
}

/// Maximum and average degree. Errors on the empty (n = 0) graph, where the
/// average is undefined.
pub fn degree_stats(g: &Graph) -> Result<(usize, f64)> {
    if g.n() == 0 {
        return Err(Error::UndefinedStat("degree statistics of an empty graph"));
    }
    let max = (0..g.n()).map(|u| g.degree(u)).max().unwrap();
    let avg = 2.0 * g.m() as f64 / g.n() as f64;
    Ok((max, avg))
}

/// Total number of triangles, counted once each via sorted-neighbor
/// intersections along a degree ordering of the nodes.
pub fn triangle_count(g: &Graph) -> u64 {
    let n = g.n();
    // rank[] orders nodes by (degree, id); each triangle is charged to its
    // two lowest-ranked corners.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&u| (g.degree(u), u));
    let mut rank = vec![0usize; n];
    for (r, &u) in order.iter().enumerate() {
        rank[u] = r;
    }
    let forward: Vec<Vec<usize>> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .copied()
                .filter(|&v| rank[v] > rank[u])
                .collect()
        })
        .collect();

    let mut total = 0u64;
    for u in 0..n {
        for &v in &forward[u] {
            total += sorted_intersection_len(&forward[u], &forward[v]);
        }
    }
    total
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> u64 {
    let (mut i, mut j, mut count) = (0, 0, 0u64);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// Number of triangles through each node.
pub fn triangle_counts_per_node(g: &Graph) -> Vec<u64> {
    let mut per_node = vec![0u64; g.n()];
    for &(u, v) in g.edges() {
        // Common neighbors w > v close a triangle u < v < w exactly once.
        let (a, b) = (g.neighbors(u), g.neighbors(v));
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = a[i];
                    if w > v {
                        per_node[u] += 1;
                        per_node[v] += 1;
                        per_node[w] += 1;
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    per_node
}

/// Mean local clustering coefficient over all n nodes, with c(v) = 0 for
/// nodes of degree < 2.
pub fn avg_clustering(g: &Graph) -> f64 {
    if g.n() == 0 {
        return 0.0;
    }
    let triangles = triangle_counts_per_node(g);
    let mut sum = 0.0;
    for (v, &tri) in triangles.iter().enumerate() {
        let d = g.degree(v);
        if d >= 2 {
            sum += 2.0 * tri as f64 / (d * (d - 1)) as f64;
        }
    }
    sum / g.n() as f64
}

/// Core number of every node, by min-degree bucket peeling.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let mut degree: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // Bucket sort nodes by degree; `position`/`vertices` let us swap nodes
    // between buckets in O(1) as degrees drop.
    let mut bin_start = vec![0usize; max_degree + 2];
    for &d in &degree {
        bin_start[d + 1] += 1;
    }
    for d in 1..bin_start.len() {
        bin_start[d] += bin_start[d - 1];
    }
    let mut vertices = vec![0usize; n];
    let mut position = vec![0usize; n];
    {
        let mut cursor = bin_start.clone();
        for v in 0..n {
            position[v] = cursor[degree[v]];
            vertices[position[v]] = v;
            cursor[degree[v]] += 1;
        }
    }

    let mut cores = vec![0usize; n];
    for i in 0..n {
        let v = vertices[i];
        cores[v] = degree[v];
        for &u in g.neighbors(v) {
            if degree[u] > degree[v] {
                // Move u to the front of its bucket, then shrink its degree.
                let du = degree[u];
                let pu = position[u];
                let pw = bin_start[du];
                let w = vertices[pw];
                if u != w {
                    vertices.swap(pu, pw);
                    position[u] = pw;
                    position[w] = pu;
                }
                bin_start[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    cores
}

/// The degeneracy: the largest k for which a non-empty subgraph with minimum
/// internal degree >= k exists.
pub fn max_kcore(g: &Graph) -> usize {
    core_numbers(g).into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, Copy)]
pub struct CentralityOptions {
    /// Successive-iterate infinity-norm convergence threshold.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CentralityOptions {
    fn default() -> Self {
        CentralityOptions {
            tol: 1e-8,
            max_iter: 1000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenvectorCentrality {
    /// Per-node centrality, unit Euclidean norm over all n entries; nodes
    /// outside the largest connected component get 0.
    pub values: Vec<f64>,
    pub average: f64,
    /// Rayleigh-quotient estimate of the dominant adjacency eigenvalue.
    pub eigenvalue: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Dominant adjacency eigenvector by power iteration on the largest
/// connected component.
///
/// The iteration runs on A + I so that bipartite components (where the
/// spectrum is symmetric and plain power iteration oscillates) still
/// converge to the Perron vector; the shift leaves eigenvectors unchanged.
pub fn eigenvector_centrality(g: &Graph, opts: CentralityOptions) -> Result<EigenvectorCentrality> {
    if g.m() == 0 {
        return Err(Error::DegenerateSpectrum(
            "eigenvector centrality of an edgeless graph",
        ));
    }
    let component = g.largest_component();
    let size = component.len();
    let mut local = vec![usize::MAX; g.n()];
    for (i, &v) in component.iter().enumerate() {
        local[v] = i;
    }

    let mut x = vec![1.0 / (size as f64).sqrt(); size];
    let mut next = vec![0.0; size];
    let mut converged = false;
    let mut iterations = 0;
    let mut eigenvalue = 0.0;
    for iter in 1..=opts.max_iter {
        iterations = iter;
        // next = (A + I) x restricted to the component.
        for (i, &v) in component.iter().enumerate() {
            let mut acc = x[i];
            for &u in g.neighbors(v) {
                acc += x[local[u]];
            }
            next[i] = acc;
        }
        let shifted_rayleigh: f64 = x.iter().zip(&next).map(|(a, b)| a * b).sum();
        eigenvalue = shifted_rayleigh - 1.0;
        // Residual of the un-shifted pair (x, eigenvalue) comes free:
        // Ax - lambda x = (A+I)x - (lambda+1) x.
        let residual = x
            .iter()
            .zip(&next)
            .map(|(&xi, &yi)| (yi - shifted_rayleigh * xi).abs())
            .fold(0.0f64, f64::max);
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        let diff = x
            .iter()
            .zip(&next)
            .map(|(&xi, &yi)| (yi / norm - xi).abs())
            .fold(0.0f64, f64::max);
        // The successive-iterate test is the convergence contract; the
        // residual check keeps the returned pair accurate on graphs with
        // large dominant eigenvalues. On the converged exit, x is the
        // iterate whose residual was just verified.
        if diff < opts.tol && residual < 5.0 * opts.tol {
            converged = true;
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&next) {
            *xi = yi / norm;
        }
    }

    let mut values = vec![0.0; g.n()];
    for (i, &v) in component.iter().enumerate() {
        values[v] = x[i].abs();
    }
    let average = values.iter().sum::<f64>() / g.n() as f64;
    Ok(EigenvectorCentrality {
        values,
        average,
        eigenvalue,
        converged,
        iterations,
    })
}

/// Assembles the full attribute vector.
///
/// Edgeless graphs get an average eigenvector centrality of 0 rather than an
/// error, since classification has to tolerate near-empty reconstructions.
pub fn extract_features(g: &Graph) -> Result<FeatureVector> {
    let (max_degree, avg_degree) = degree_stats(g)?;
    let avg_eigenvector_centrality = if g.m() == 0 {
        0.0
    } else {
        eigenvector_centrality(g, CentralityOptions::default())?.average
    };
    Ok(FeatureVector {
        num_nodes: g.n(),
        num_edges: g.m(),
        density: density(g),
        max_degree,
        avg_degree,
        max_kcore: max_kcore(g),
        avg_clustering: avg_clustering(g),
        num_triangles: triangle_count(g),
        avg_eigenvector_centrality,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn star() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    /// K4 minus one edge.
    fn diamond() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]).unwrap()
    }

    fn path3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn k4() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn density_examples() {
        assert_eq!(density(&triangle()), 1.0);
        assert!((density(&path3()) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(density(&Graph::empty(1)), 0.0);
        assert_eq!(density(&Graph::empty(0)), 0.0);
    }

    #[test]
    fn density_direct_formula() {
        // n=60, m=94 like a typical Enzymes graph: 94 / C(60,2).
        let mut edges = Vec::new();
        let mut count = 0;
        'outer: for u in 0..60 {
            for v in (u + 1)..60 {
                edges.push((u, v));
                count += 1;
                if count == 94 {
                    break 'outer;
                }
            }
        }
        let g = Graph::from_edges(60, edges).unwrap();
        assert!((density(&g) - 94.0 / 1770.0).abs() < 1e-15);
    }

    #[test]
    fn degree_stats_examples() {
        assert_eq!(degree_stats(&star()).unwrap(), (3, 1.5));
        assert_eq!(degree_stats(&triangle()).unwrap(), (2, 2.0));
        assert!(matches!(
            degree_stats(&Graph::empty(0)),
            Err(Error::UndefinedStat(_))
        ));
    }

    #[test]
    fn triangle_count_examples() {
        assert_eq!(triangle_count(&triangle()), 1);
        assert_eq!(triangle_count(&k4()), 4);
        assert_eq!(triangle_count(&star()), 0);
        assert_eq!(triangle_count(&diamond()), 2);
    }

    #[test]
    fn per_node_triangles_sum_to_three_times_total() {
        let g = crate::generators::gen_erdos_renyi(60, 0.2, 5).unwrap();
        let per_node = triangle_counts_per_node(&g);
        assert_eq!(per_node.iter().sum::<u64>(), 3 * triangle_count(&g));
    }

    #[test]
    fn clustering_examples() {
        assert!((avg_clustering(&triangle()) - 1.0).abs() < 1e-15);
        assert_eq!(avg_clustering(&star()), 0.0);
        // Diamond: two degree-3 nodes with c = 2/3, two degree-2 nodes with
        // c = 1; mean = 5/6.
        assert!((avg_clustering(&diamond()) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn kcore_examples() {
        assert_eq!(max_kcore(&triangle()), 2);
        assert_eq!(max_kcore(&diamond()), 2);
        assert_eq!(max_kcore(&k4()), 3);
        // Trees always peel down to 1.
        let path = Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        assert_eq!(max_kcore(&path), 1);
        assert_eq!(max_kcore(&star()), 1);
        assert_eq!(max_kcore(&Graph::empty(4)), 0);
    }

    #[test]
    fn centrality_uniform_on_k3() {
        let c = eigenvector_centrality(&triangle(), CentralityOptions::default()).unwrap();
        assert!(c.converged);
        let expected = 1.0 / 3.0f64.sqrt();
        for v in &c.values {
            assert!((v - expected).abs() < 1e-7);
        }
        assert!((c.average - expected).abs() < 1e-7);
        assert!((c.eigenvalue - 2.0).abs() < 1e-7);
    }

    #[test]
    fn centrality_star_analytic() {
        // K_{1,3}: lambda = sqrt(3), center 1/sqrt(2), leaves 1/sqrt(6).
        let c = eigenvector_centrality(&star(), CentralityOptions::default()).unwrap();
        assert!(c.converged);
        assert!((c.values[0] - 1.0 / 2.0f64.sqrt()).abs() < 1e-7);
        for v in 1..4 {
            assert!((c.values[v] - 1.0 / 6.0f64.sqrt()).abs() < 1e-7);
        }
        let expected_avg = (1.0 / 2.0f64.sqrt() + 3.0 / 6.0f64.sqrt()) / 4.0;
        assert!((c.average - expected_avg).abs() < 1e-7);
        assert!((c.eigenvalue - 3.0f64.sqrt()).abs() < 1e-7);
    }

    #[test]
    fn centrality_ignores_smaller_components_and_isolated_nodes() {
        // Triangle plus a disjoint edge plus an isolated node.
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let c = eigenvector_centrality(&g, CentralityOptions::default()).unwrap();
        assert_eq!(c.values[3], 0.0);
        assert_eq!(c.values[4], 0.0);
        assert_eq!(c.values[5], 0.0);
        let norm: f64 = c.values.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn centrality_errors_on_edgeless() {
        assert!(matches!(
            eigenvector_centrality(&Graph::empty(5), CentralityOptions::default()),
            Err(Error::DegenerateSpectrum(_))
        ));
    }

    #[test]
    fn centrality_residual_invariant() {
        let opts = CentralityOptions::default();
        for seed in 0..5 {
            let g = crate::generators::gen_erdos_renyi(80, 0.1, seed).unwrap();
            if g.m() == 0 {
                continue;
            }
            let c = eigenvector_centrality(&g, opts).unwrap();
            assert!(c.converged);
            // ||A v - lambda v||_inf < 10 tol on the returned pair.
            let mut residual = 0.0f64;
            for u in 0..g.n() {
                let av: f64 = g.neighbors(u).iter().map(|&v| c.values[v]).sum();
                residual = residual.max((av - c.eigenvalue * c.values[u]).abs());
            }
            assert!(
                residual < 10.0 * opts.tol,
                "residual {residual:.3e} at seed {seed}"
            );
        }
    }

    #[test]
    fn extract_features_k3() {
        let f = extract_features(&triangle()).unwrap();
        assert_eq!(
            (f.num_nodes, f.num_edges, f.max_degree, f.max_kcore, f.num_triangles),
            (3, 3, 2, 2, 1)
        );
        assert_eq!(f.density, 1.0);
        assert_eq!(f.avg_degree, 2.0);
        assert_eq!(f.avg_clustering, 1.0);
        assert!((f.avg_eigenvector_centrality - 0.5774).abs() < 1e-4);
    }

    #[test]
    fn extract_features_edgeless() {
        let f = extract_features(&Graph::empty(5)).unwrap();
        assert_eq!(f.to_array(), [5.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn er_feature_expectations() {
        // In G(n, p) both density and mean local clustering estimate p.
        let (n, p) = (1000, 0.075);
        let g = crate::generators::gen_erdos_renyi(n, p, 123).unwrap();
        let f = extract_features(&g).unwrap();

        let pairs = (n * (n - 1) / 2) as f64;
        let sigma_density = (p * (1.0 - p) / pairs).sqrt();
        assert!((f.density - p).abs() < 3.0 * sigma_density);

        // Clustering concentrates tightly around p; allow a generous band.
        assert!((f.avg_clustering - p).abs() < 0.01);

        let sigma_deg = (2.0 / n as f64) * (pairs * p * (1.0 - p)).sqrt();
        assert!((f.avg_degree - p * (n - 1) as f64).abs() < 3.0 * sigma_deg);
    }

    #[test]
    fn csv_row_matches_header_arity() {
        let f = extract_features(&diamond()).unwrap();
        let row = f.to_csv_row();
        assert_eq!(
            row.split(',').count(),
            FeatureVector::CSV_HEADER.split(',').count()
        );
        let json = serde_json::to_value(&f).unwrap();
        assert_eq!(json["num_nodes"], 4);
        assert_eq!(json["num_triangles"], 2);
    }

    #[test]
    fn features_are_permutation_invariant() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let g = crate::generators::gen_erdos_renyi(60, 0.12, 3).unwrap();
        let f1 = extract_features(&g).unwrap();

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut rng);
        let relabeled: Vec<(usize, usize)> =
            g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let g2 = Graph::from_edges(g.n(), relabeled).unwrap();
        let f2 = extract_features(&g2).unwrap();

        assert_eq!(f1.num_nodes, f2.num_nodes);
        assert_eq!(f1.num_edges, f2.num_edges);
        assert_eq!(f1.max_degree, f2.max_degree);
        assert_eq!(f1.max_kcore, f2.max_kcore);
        assert_eq!(f1.num_triangles, f2.num_triangles);
        assert!((f1.avg_clustering - f2.avg_clustering).abs() < 1e-9);
        assert!((f1.avg_eigenvector_centrality - f2.avg_eigenvector_centrality).abs() < 1e-6);
    }
}
