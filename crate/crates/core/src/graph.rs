//! Simple undirected graphs on dense vertex indices, and the cut-rank.

use fixedbitset::FixedBitSet;
use rand::Rng;

use crate::f2::{F2Matrix, MixedDecomposition};

pub type VertexSet = FixedBitSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        Graph { adj: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// `G(n, p)`.
    pub fn random<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    pub fn complete(n: usize) -> Graph {
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges)
    }

    pub fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Graph::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        assert!(u != v, "no self-loops in a simple graph");
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.adj[u].set(v, false);
        self.adj[v].set(u, false);
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        debug_assert!(u != v);
        self.adj[u].toggle(v);
        self.adj[v].toggle(u);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].ones()
    }

    pub fn neighborhood(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones(..)).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n()).flat_map(|u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v))).collect()
    }

    pub fn full_set(&self) -> VertexSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        s.insert_range(..);
        s
    }

    pub fn set_of(&self, vs: impl IntoIterator<Item = usize>) -> VertexSet {
        let mut s = FixedBitSet::with_capacity(self.n());
        s.extend(vs);
        s
    }

    /// Biadjacency matrix between `x` and `within \ x`, with the row and
    /// column vertex lists (ascending).
    pub fn cut_matrix_within(&self, x: &VertexSet, within: &VertexSet) -> (F2Matrix, Vec<usize>, Vec<usize>) {
        let rows: Vec<usize> = x.intersection(within).collect();
        let cols: Vec<usize> = within.difference(x).collect();
        let m = F2Matrix::from_fn(rows.len(), cols.len(), |i, j| self.has_edge(rows[i], cols[j]));
        (m, rows, cols)
    }

    pub fn cut_matrix(&self, x: &VertexSet) -> (F2Matrix, Vec<usize>, Vec<usize>) {
        self.cut_matrix_within(x, &self.full_set())
    }

    /// `ρ(X)`: GF(2) rank of the biadjacency matrix between `X` and `V \ X`.
    pub fn cut_rank(&self, x: &VertexSet) -> usize {
        self.cut_matrix(x).0.rank()
    }

    pub fn cut_rank_within(&self, x: &VertexSet, within: &VertexSet) -> usize {
        self.cut_matrix_within(x, within).0.rank()
    }

    /// Greedy mixed deletion-bipartite decomposition of the cut `(X, V \ X)`,
    /// with row/column indices translated back to vertices.
    pub fn mixed_decomposition(&self, x: &VertexSet) -> MixedCut {
        self.mixed_decomposition_within(x, &self.full_set())
    }

    /// The greedy is run on the cut matrix and on its transpose and the
    /// cheaper result is kept, so the score does not depend on which side
    /// of the cut is passed in.
    pub fn mixed_decomposition_within(&self, x: &VertexSet, within: &VertexSet) -> MixedCut {
        let (m, rows, cols) = self.cut_matrix_within(x, within);
        let d = m.mixed_decomposition_greedy();
        let dt = m.transpose().mixed_decomposition_greedy();
        if dt.score < d.score {
            let swapped = MixedDecomposition::new(
                dt.pairs.into_iter().map(|(a, b)| (b, a)).collect(),
                dt.deleted_cols,
                dt.deleted_rows,
            );
            MixedCut::from_matrix_decomposition(&swapped, &rows, &cols)
        } else {
            MixedCut::from_matrix_decomposition(&d, &rows, &cols)
        }
    }

    pub fn mixed_score_within(&self, x: &VertexSet, within: &VertexSet) -> usize {
        let m = self.cut_matrix_within(x, within).0;
        m.mixed_decomposition_greedy().score.min(m.transpose().mixed_decomposition_greedy().score)
    }

    /// Graph local complementation at `v`: complement the edges within `N(v)`.
    pub fn local_complement(&mut self, v: usize) {
        let nbrs: Vec<usize> = self.neighbors(v).collect();
        for (i, &a) in nbrs.iter().enumerate() {
            for &b in &nbrs[i + 1..] {
                self.toggle_edge(a, b);
            }
        }
    }

    /// Pivot on edge `uv`: `G ∧ uv = G * u * v * u`.
    pub fn pivot(&mut self, u: usize, v: usize) {
        assert!(self.has_edge(u, v), "pivot needs an edge");
        self.local_complement(u);
        self.local_complement(v);
        self.local_complement(u);
    }

    /// Connected components of the subgraph induced on `within`.
    pub fn components_within(&self, within: &VertexSet) -> Vec<VertexSet> {
        let mut seen = FixedBitSet::with_capacity(self.n());
        let mut out = Vec::new();
        for s in within.ones() {
            if seen.contains(s) {
                continue;
            }
            let mut comp = FixedBitSet::with_capacity(self.n());
            let mut stack = vec![s];
            seen.insert(s);
            while let Some(v) = stack.pop() {
                comp.insert(v);
                for n in self.adj[v].intersection(within) {
                    if !seen.contains(n) {
                        seen.insert(n);
                        stack.push(n);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n() <= 1 || self.components_within(&self.full_set()).len() == 1
    }
}

/// A mixed deletion-bipartite decomposition of a vertex cut, in vertex terms.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MixedCut {
    pub pairs: Vec<(Vec<usize>, Vec<usize>)>,
    pub deleted: Vec<usize>,
    pub score: usize,
}

impl MixedCut {
    fn from_matrix_decomposition(d: &MixedDecomposition, rows: &[usize], cols: &[usize]) -> MixedCut {
        let pairs = d
            .pairs
            .iter()
            .map(|(a, b)| (a.iter().map(|&i| rows[i]).collect(), b.iter().map(|&j| cols[j]).collect()))
            .collect();
        let deleted = d
            .deleted_rows
            .iter()
            .map(|&i| rows[i])
            .chain(d.deleted_cols.iter().map(|&j| cols[j]))
            .collect();
        MixedCut { pairs, deleted, score: d.score }
    }
}
