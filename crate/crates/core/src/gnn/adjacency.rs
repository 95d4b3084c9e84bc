use ndarray::Array2;

use crate::encoding::EncodedGraph;
use crate::scalar::Scalar;

/// Symmetrically normalized adjacency `D^-1/2 A D^-1/2` without self-loops.
///
/// Messages flow along transitions: node `v` aggregates from its
/// predecessors `u` with coefficient `m(u→v) / sqrt(d(u)·d(v))`, where `m`
/// counts parallel edges over symbols and `d(x) = max(1, in-degree of x)`
/// weighted by multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedAdjacency<T> {
    num_nodes: usize,
    /// `(dst, src, coef)` sorted by `(dst, src)`.
    entries: Vec<(usize, usize, T)>,
}

impl<T: Scalar> NormalizedAdjacency<T> {
    /// Builds from a list of directed edges; repeated pairs add multiplicity.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut pairs: Vec<(usize, usize)> = edges.into_iter().map(|(u, v)| (v, u)).collect();
        pairs.sort_unstable();
        let mut in_degree = vec![0usize; num_nodes];
        for &(v, _) in &pairs {
            in_degree[v] += 1;
        }
        let deg = |x: usize| T::from_usize(in_degree[x].max(1)).unwrap();
        let mut entries: Vec<(usize, usize, T)> = Vec::new();
        for (v, u) in pairs {
            match entries.last_mut() {
                Some((lv, lu, m)) if *lv == v && *lu == u => *m += T::one(),
                _ => entries.push((v, u, T::one())),
            }
        }
        for (v, u, m) in &mut entries {
            *m /= (deg(*u) * deg(*v)).sqrt();
        }
        Self { num_nodes, entries }
    }

    pub fn from_graph(g: &EncodedGraph<T>) -> Self {
        Self::from_edges(g.num_nodes(), g.edges.iter().map(|e| (e.src, e.dst)))
    }

    /// Relabels node `i` as `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_nodes, "permutation length");
        let mut entries: Vec<(usize, usize, T)> =
            self.entries.iter().map(|&(v, u, c)| (perm[v], perm[u], c)).collect();
        entries.sort_unstable_by_key(|&(v, u, _)| (v, u));
        Self { num_nodes: self.num_nodes, entries }
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn entries(&self) -> &[(usize, usize, T)] {
        &self.entries
    }

    /// `Â · m`, accumulating rows in ascending source order.
    pub fn apply(&self, m: &Array2<T>) -> Array2<T> {
        let mut out = Array2::zeros((self.num_nodes, m.ncols()));
        for &(v, u, c) in &self.entries {
            out.row_mut(v).scaled_add(c, &m.row(u));
        }
        out
    }

    /// `Âᵀ · m`.
    pub fn apply_transpose(&self, m: &Array2<T>) -> Array2<T> {
        let mut out = Array2::zeros((self.num_nodes, m.ncols()));
        for &(v, u, c) in &self.entries {
            out.row_mut(u).scaled_add(c, &m.row(v));
        }
        out
    }

    /// Dense `Â[dst][src]`.
    pub fn to_dense(&self) -> Array2<T> {
        let mut d = Array2::zeros((self.num_nodes, self.num_nodes));
        for &(v, u, c) in &self.entries {
            d[[v, u]] = c;
        }
        d
    }
}
