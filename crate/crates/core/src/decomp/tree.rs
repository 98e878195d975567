//! Tree decompositions from min-fill elimination, and weighted balanced
//! separators read off them.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// The bags form a tree.
    pub fn check_tree(&self) -> Result<()> {
        let m = self.bags.len();
        if m == 0 || self.edges.len() + 1 != m || self.edges.iter().any(|&(a, b)| a >= m || b >= m) {
            return Err(Error::InvalidDecomposition("bags do not form a tree".into()));
        }
        let adj = self.adjacency();
        let mut seen = vec![false; m];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if seen.contains(&false) {
            return Err(Error::InvalidDecomposition("bag tree is disconnected".into()));
        }
        Ok(())
    }

    /// Every vertex of `within` is in some bag.
    pub fn check_vertex_coverage(&self, within: &VertexSet) -> Result<()> {
        for v in within.ones() {
            if !self.bags.iter().any(|b| b.contains(&v)) {
                return Err(Error::InvalidDecomposition(format!("vertex {v} is in no bag")));
            }
        }
        Ok(())
    }

    /// Every edge of `g[within]` lies inside some bag.
    pub fn check_edge_coverage(&self, g: &Graph, within: &VertexSet) -> Result<()> {
        for (u, v) in g.edges() {
            if within.contains(u) && within.contains(v) && !self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
                return Err(Error::InvalidDecomposition(format!("edge {u}-{v} is in no bag")));
            }
        }
        Ok(())
    }

    /// The bags holding any one vertex form a connected subtree.
    pub fn check_connected_subtrees(&self) -> Result<()> {
        let adj = self.adjacency();
        let mut vertices: Vec<usize> = self.bags.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        for v in vertices {
            let holding: Vec<usize> = (0..self.bags.len()).filter(|&t| self.bags[t].contains(&v)).collect();
            let mut seen = vec![false; self.bags.len()];
            let mut stack = vec![holding[0]];
            seen[holding[0]] = true;
            let mut reached = 1;
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if !seen[y] && self.bags[y].contains(&v) {
                        seen[y] = true;
                        reached += 1;
                        stack.push(y);
                    }
                }
            }
            if reached != holding.len() {
                return Err(Error::InvalidDecomposition(format!("bags of vertex {v} are not connected")));
            }
        }
        Ok(())
    }

    pub fn validate(&self, g: &Graph, within: &VertexSet) -> Result<()> {
        self.check_tree()?;
        self.check_vertex_coverage(within)?;
        self.check_edge_coverage(g, within)?;
        self.check_connected_subtrees()
    }

    /// Intersect every bag with `within`; still a decomposition of the
    /// induced subgraph.
    pub fn restrict(&self, within: &VertexSet) -> TreeDecomposition {
        TreeDecomposition {
            bags: self.bags.iter().map(|b| b.iter().copied().filter(|&v| within.contains(v)).collect()).collect(),
            edges: self.edges.clone(),
        }
    }

    /// A set `X`, no larger than the biggest bag, such that no component of
    /// `g[within] ∖ X` weighs more than half of `w(within)`.
    ///
    /// Starting from bag 0, repeatedly steps into the branch of the tree
    /// holding the heavy component of `g ∖ bag` until no component is
    /// heavy, then drops separator vertices (lowest first) that are not
    /// needed for the weight condition.
    pub fn balanced_separator(&self, g: &Graph, weights: &[f64], within: &VertexSet) -> Result<Vec<usize>> {
        let total: f64 = within.ones().map(|v| weights[v]).sum();
        if total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let td = self.restrict(within);
        let adj = td.adjacency();
        let heavy = |x: &[usize]| -> Option<VertexSet> {
            let mut rest = within.clone();
            for &v in x {
                rest.set(v, false);
            }
            g.components_within(&rest)
                .into_iter()
                .find(|c| c.ones().map(|v| weights[v]).sum::<f64>() > total / 2.0 + 1e-12)
        };
        let mut t = 0;
        let mut steps = 0;
        while let Some(comp) = heavy(&td.bags[t]) {
            steps += 1;
            if steps > td.bags.len() {
                return Err(Error::InvalidDecomposition("separator walk did not settle".into()));
            }
            let c = comp.ones().next().unwrap();
            // the heavy component misses bag t, so it lives in one branch
            let next = adj[t].iter().copied().find(|&y| td.branch_contains(&adj, y, t, c));
            let Some(y) = next else {
                return Err(Error::InvalidDecomposition(format!("vertex {c} is in no bag")));
            };
            t = y;
        }
        let mut sep = td.bags[t].clone();
        sep.sort_unstable();
        let mut i = 0;
        while i < sep.len() {
            let mut trial = sep.clone();
            trial.remove(i);
            if heavy(&trial).is_none() {
                sep = trial;
            } else {
                i += 1;
            }
        }
        Ok(sep)
    }

    fn branch_contains(&self, adj: &[Vec<usize>], start: usize, from: usize, v: usize) -> bool {
        let mut stack = vec![(start, from)];
        while let Some((x, p)) = stack.pop() {
            if self.bags[x].contains(&v) {
                return true;
            }
            for &y in &adj[x] {
                if y != p {
                    stack.push((y, x));
                }
            }
        }
        false
    }
}

/// Greedy min-fill elimination on `g[within]`. The bag of a vertex is the
/// vertex with its not-yet-eliminated neighbours; it is attached to the bag
/// of the first of those neighbours to be eliminated.
pub fn tree_decomposition_heuristic(g: &Graph, within: &VertexSet) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<FixedBitSet> = (0..n)
        .map(|v| {
            if within.contains(v) {
                let mut a = g.neighborhood(v).clone();
                a.intersect_with(within);
                a
            } else {
                FixedBitSet::with_capacity(n)
            }
        })
        .collect();
    let mut alive = within.clone();
    let mut order = Vec::new();
    let mut bags = Vec::new();
    while alive.count_ones(..) > 0 {
        let v = alive
            .ones()
            .min_by_key(|&v| {
                let nb: Vec<usize> = adj[v].ones().collect();
                let mut fill = 0;
                for (i, &a) in nb.iter().enumerate() {
                    for &b in &nb[i + 1..] {
                        if !adj[a].contains(b) {
                            fill += 1;
                        }
                    }
                }
                (fill, nb.len(), v)
            })
            .unwrap();
        let nb: Vec<usize> = adj[v].ones().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &nb {
            adj[a].set(v, false);
        }
        alive.set(v, false);
        let mut bag = vec![v];
        bag.extend(nb);
        bags.push(bag);
        order.push(v);
    }
    if bags.is_empty() {
        return TreeDecomposition { bags: vec![Vec::new()], edges: Vec::new() };
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut edges = Vec::new();
    for i in 0..bags.len() - 1 {
        let target = bags[i][1..].iter().map(|&u| pos[u]).min().unwrap_or(i + 1);
        edges.push((i, target));
    }
    TreeDecomposition { bags, edges }
}
