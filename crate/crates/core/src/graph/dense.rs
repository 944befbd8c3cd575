use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Node-count cap for materializing a dense adjacency matrix.
pub const DEFAULT_DENSE_CAP: usize = 20_000;

/// Dense symmetric {0,1} adjacency matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseAdjacency {
    n: usize,
    entries: Array2<f64>,
}

impl DenseAdjacency {
    /// Materializes the adjacency matrix of `g`, guarded by the default cap.
    pub fn from_graph(g: &Graph) -> Result<DenseAdjacency> {
        Self::from_graph_with_cap(g, DEFAULT_DENSE_CAP)
    }

    pub fn from_graph_with_cap(g: &Graph, cap: usize) -> Result<DenseAdjacency> {
        if g.n() > cap {
            return Err(Error::DenseCapExceeded { n: g.n(), cap });
        }
        let mut entries = Array2::zeros((g.n(), g.n()));
        for &(u, v) in g.edges() {
            entries[(u, v)] = 1.0;
            entries[(v, u)] = 1.0;
        }
        Ok(DenseAdjacency { n: g.n(), entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The matrix entries; values are exactly 0.0 or 1.0.
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        self.entries[(i, j)] != 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let a = DenseAdjacency::from_graph(&g).unwrap();
        assert_eq!(a.entries().as_slice().unwrap(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn empty_graph_is_zero_matrix() {
        let g = Graph::empty(3);
        let a = DenseAdjacency::from_graph(&g).unwrap();
        assert!(a.entries().iter().all(|&x| x == 0.0));
        assert_eq!(a.entries().dim(), (3, 3));
    }

    #[test]
    fn triangle_has_six_ones_and_zero_diagonal() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let a = DenseAdjacency::from_graph(&g).unwrap();
        assert_eq!(a.entries().sum(), 6.0);
        for i in 0..3 {
            assert_eq!(a.entries()[(i, i)], 0.0);
        }
    }

    #[test]
    fn respects_cap() {
        let g = Graph::empty(10);
        let err = DenseAdjacency::from_graph_with_cap(&g, 5).unwrap_err();
        assert!(matches!(err, Error::DenseCapExceeded { n: 10, cap: 5 }));
    }
}
