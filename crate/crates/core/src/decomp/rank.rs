//! Rank decompositions, stored as rooted binary trees.
//!
//! An unrooted subcubic tree is obtained by suppressing the degree-two
//! root, so the cuts of the decomposition are exactly the leaf sets of the
//! non-root subtrees (the root's two children describe the same cut). Leaf
//! nodes are `0..k` and each holds a set of graph vertices through
//! `assign`; internal nodes are `k..2k−1`. The standard form has one
//! vertex per leaf, the focused form one special vertex per leaf.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub(crate) const NONE: usize = usize::MAX;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Objective {
    CutRank,
    Mixed,
}

impl Objective {
    pub fn score(self, g: &Graph, x: &VertexSet, within: &VertexSet) -> usize {
        match self {
            Objective::CutRank => g.cut_rank_within(x, within),
            Objective::Mixed => g.mixed_score_within(x, within),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::CutRank => "cut_rank",
            Objective::Mixed => "mixed",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankDecomposition {
    n: usize,
    k: usize,
    root: usize,
    parent: Vec<usize>,
    children: Vec<[usize; 2]>,
    assign: Vec<usize>,
}

impl RankDecomposition {
    /// A caterpillar with the given leaf order, rooted at its first edge.
    pub(crate) fn caterpillar(n: usize, leaf_sets: &[Vec<usize>]) -> RankDecomposition {
        let k = leaf_sets.len();
        assert!(k >= 1);
        let mut rd = RankDecomposition::with_leaves(n, leaf_sets);
        if k == 1 {
            return rd;
        }
        // right-comb: ((((l0 l1) l2) l3) …)
        let mut top = 0;
        for leaf in 1..k {
            let p = k + leaf - 1;
            rd.children[p] = [top, leaf];
            rd.parent[top] = p;
            rd.parent[leaf] = p;
            top = p;
        }
        rd.root = top;
        rd
    }

    fn with_leaves(n: usize, leaf_sets: &[Vec<usize>]) -> RankDecomposition {
        let k = leaf_sets.len();
        let nodes = (2 * k).saturating_sub(1);
        let mut assign = vec![NONE; n];
        for (l, set) in leaf_sets.iter().enumerate() {
            for &v in set {
                assign[v] = l;
            }
        }
        RankDecomposition {
            n,
            k,
            root: 0,
            parent: vec![NONE; nodes],
            children: vec![[NONE, NONE]; nodes],
            assign,
        }
    }

    /// Build from an explicit nested structure: `Leaf(sets index)` or a
    /// pair of subtrees.
    pub fn from_nested(n: usize, leaf_sets: &[Vec<usize>], tree: &Nested) -> RankDecomposition {
        let mut rd = RankDecomposition::with_leaves(n, leaf_sets);
        let mut next = rd.k;
        fn build(rd: &mut RankDecomposition, t: &Nested, next: &mut usize) -> usize {
            match t {
                Nested::Leaf(l) => *l,
                Nested::Pair(a, b) => {
                    let x = build(rd, a, next);
                    let y = build(rd, b, next);
                    let p = *next;
                    *next += 1;
                    rd.children[p] = [x, y];
                    rd.parent[x] = p;
                    rd.parent[y] = p;
                    p
                }
            }
        }
        rd.root = build(&mut rd, tree, &mut next);
        rd
    }

    /// Vertex count of the underlying graph.
    pub fn num_graph_vertices(&self) -> usize {
        self.n
    }

    pub fn num_leaves(&self) -> usize {
        self.k
    }

    fn is_leaf(&self, x: usize) -> bool {
        x < self.k
    }

    pub fn leaf_of(&self, v: usize) -> Option<usize> {
        self.assign.get(v).copied().filter(|&l| l != NONE)
    }

    pub fn leaf_sets(&self) -> Vec<Vec<usize>> {
        let mut sets = vec![Vec::new(); self.k];
        for (v, &l) in self.assign.iter().enumerate() {
            if l != NONE {
                sets[l].push(v);
            }
        }
        sets
    }

    /// Vertices covered by the decomposition.
    pub fn domain(&self) -> VertexSet {
        let mut s = FixedBitSet::with_capacity(self.n);
        s.extend(self.assign.iter().enumerate().filter(|(_, &l)| l != NONE).map(|(v, _)| v));
        s
    }

    /// Nodes in post-order.
    fn post_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.parent.len());
        let mut stack = vec![(self.root, false)];
        while let Some((x, done)) = stack.pop() {
            if done || self.is_leaf(x) {
                out.push(x);
            } else {
                stack.push((x, true));
                let [a, b] = self.children[x];
                stack.push((b, false));
                stack.push((a, false));
            }
        }
        out
    }

    /// Vertex set below every node.
    fn subtree_sets(&self) -> Vec<VertexSet> {
        let mut sets = vec![FixedBitSet::with_capacity(self.n); self.parent.len()];
        for (v, &l) in self.assign.iter().enumerate() {
            if l != NONE {
                sets[l].insert(v);
            }
        }
        for x in self.post_order() {
            if !self.is_leaf(x) {
                let [a, b] = self.children[x];
                let mut s = sets[a].clone();
                s.union_with(&sets[b]);
                sets[x] = s;
            }
        }
        sets
    }

    /// Nodes whose parent edge is a distinct edge of the unrooted tree.
    fn cut_nodes(&self) -> Vec<usize> {
        if self.k < 2 {
            return Vec::new();
        }
        let skip = self.children[self.root][1];
        (0..self.parent.len()).filter(|&x| x != self.root && x != skip).collect()
    }

    /// One side `A_e` of every edge `e` of the unrooted tree.
    pub fn cuts(&self) -> Vec<VertexSet> {
        let sets = self.subtree_sets();
        self.cut_nodes().into_iter().map(|x| sets[x].clone()).collect()
    }

    /// Edges of the unrooted tree (root suppressed), with nodes renumbered
    /// so that leaves keep ids `0..k`.
    pub fn tree_edges(&self) -> Vec<(usize, usize)> {
        if self.k < 2 {
            return Vec::new();
        }
        let relabel = |x: usize| if x > self.root { x - 1 } else { x };
        let [c0, c1] = self.children[self.root];
        let mut edges = vec![(relabel(c0), relabel(c1))];
        for x in 0..self.parent.len() {
            let p = self.parent[x];
            if x != self.root && p != self.root && p != NONE {
                edges.push((relabel(p), relabel(x)));
            }
        }
        edges.sort_unstable();
        edges
    }

    /// Structural check of the unrooted tree and the leaf map.
    ///
    /// Rebuilds the unrooted tree from [`tree_edges`](Self::tree_edges) and
    /// checks it is a tree whose internal nodes have degree 3 and whose
    /// leaves are exactly the nodes holding vertices; every vertex of
    /// `domain` lies in exactly one leaf; with `special`, no leaf holds more
    /// than one special vertex.
    pub fn validate(&self, domain: &VertexSet, special: Option<&VertexSet>) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidDecomposition(m));
        let nodes = if self.k < 2 { self.k } else { 2 * self.k - 2 };
        let edges = self.tree_edges();
        if self.k >= 2 && edges.len() + 1 != nodes {
            return bad(format!("{} edges on {} nodes", edges.len(), nodes));
        }
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in &edges {
            if a >= nodes || b >= nodes || a == b {
                return bad(format!("bad edge {a}-{b}"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        // connectivity
        if nodes > 0 {
            let mut seen = vec![false; nodes];
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
            if seen.iter().any(|s| !s) {
                return bad("tree is disconnected".into());
            }
        }
        for (x, a) in adj.iter().enumerate() {
            let leaf = x < self.k;
            let ok = if self.k <= 2 { a.len() == self.k - 1 } else if leaf { a.len() == 1 } else { a.len() == 3 };
            if !ok {
                return bad(format!("node {x} has degree {}", a.len()));
            }
        }
        let sets = self.leaf_sets();
        for v in domain.ones() {
            if self.leaf_of(v).is_none() {
                return bad(format!("vertex {v} is in no leaf"));
            }
        }
        for (l, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return bad(format!("leaf {l} is empty"));
            }
            if set.iter().any(|&v| !domain.contains(v)) {
                return bad(format!("leaf {l} holds a vertex outside the domain"));
            }
            if let Some(s) = special {
                if set.iter().filter(|&&v| s.contains(v)).count() > 1 {
                    return bad(format!("leaf {l} holds more than one special vertex"));
                }
            }
        }
        Ok(())
    }

    /// Maximum objective score over the cuts, measured within the domain.
    pub fn score(&self, g: &Graph, objective: Objective) -> usize {
        let dom = self.domain();
        self.cuts().iter().map(|a| objective.score(g, a, &dom)).max().unwrap_or(0)
    }

    pub fn width(&self, g: &Graph) -> usize {
        self.score(g, Objective::CutRank)
    }

    pub fn mixed_width(&self, g: &Graph) -> usize {
        self.score(g, Objective::Mixed)
    }

    /// Leaves in depth-first order, and for each node the half-open range
    /// of positions its subtree occupies in that order.
    fn leaf_order(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let mut order = Vec::with_capacity(self.k);
        let mut range = vec![(0, 0); self.parent.len()];
        for x in self.post_order() {
            if self.is_leaf(x) {
                range[x] = (order.len(), order.len() + 1);
                order.push(x);
            } else {
                let [a, b] = self.children[x];
                range[x] = (range[a].0.min(range[b].0), range[a].1.max(range[b].1));
            }
        }
        (order, range)
    }

    /// The cut `(A_e, U ∖ A_e)` minimising `|w(A_e) − w(U ∖ A_e)|` among
    /// cuts with both sides non-empty in `U` (lowest edge first on ties).
    ///
    /// Each subtree is a contiguous block of the depth-first leaf order, so
    /// after one prefix-sum pass every cut weight is a difference of two
    /// prefix sums and the whole search is linear.
    ///
    /// If no single vertex carries more than two thirds of `w(U)`, the
    /// heavier side carries at most two thirds.
    pub fn balanced_partition(&self, weights: &[f64], within: &VertexSet) -> Result<(VertexSet, VertexSet)> {
        let total: f64 = within.ones().map(|v| weights[v]).sum();
        if total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        let (order, range) = self.leaf_order();
        let mut leaf_w = vec![0.0; self.k];
        let mut leaf_c = vec![0usize; self.k];
        for v in within.ones() {
            let l = self.leaf_of(v).ok_or_else(|| Error::InvalidDecomposition(format!("vertex {v} not covered")))?;
            leaf_w[l] += weights[v];
            leaf_c[l] += 1;
        }
        let mut pw = vec![0.0; self.k + 1];
        let mut pc = vec![0usize; self.k + 1];
        for (i, &l) in order.iter().enumerate() {
            pw[i + 1] = pw[i] + leaf_w[l];
            pc[i + 1] = pc[i] + leaf_c[l];
        }
        let count = pc[self.k];
        let mut best: Option<(f64, usize)> = None;
        for x in self.cut_nodes() {
            let (lo, hi) = range[x];
            let c = pc[hi] - pc[lo];
            if c == 0 || c == count {
                continue;
            }
            let imbalance = (2.0 * (pw[hi] - pw[lo]) - total).abs();
            if best.is_none_or(|(b, _)| imbalance < b - 1e-12) {
                best = Some((imbalance, x));
            }
        }
        let Some((_, x)) = best else {
            // a single covered vertex: the only split puts it on one side
            let mut empty = within.clone();
            empty.clear();
            return Ok((within.clone(), empty));
        };
        let (lo, hi) = range[x];
        let sets = self.leaf_sets();
        let mut a = FixedBitSet::with_capacity(self.n);
        for &l in &order[lo..hi] {
            a.extend(sets[l].iter().copied().filter(|&v| within.contains(v)));
        }
        let mut b = within.clone();
        b.difference_with(&a);
        Ok((a, b))
    }

    // --- tree surgery used by the annealer ---

    fn sibling(&self, x: usize) -> usize {
        let [a, b] = self.children[self.parent[x]];
        if a == x {
            b
        } else {
            a
        }
    }

    fn replace_child(&mut self, p: usize, old: usize, new: usize) {
        let c = &mut self.children[p];
        if c[0] == old {
            c[0] = new;
        } else {
            debug_assert_eq!(c[1], old);
            c[1] = new;
        }
    }

    /// Detach `x` and splice out its parent. Returns the freed node.
    fn prune(&mut self, x: usize) -> usize {
        let p = self.parent[x];
        let s = self.sibling(x);
        let gp = self.parent[p];
        if gp == NONE {
            self.root = s;
            self.parent[s] = NONE;
        } else {
            self.replace_child(gp, p, s);
            self.parent[s] = gp;
        }
        self.parent[x] = NONE;
        self.parent[p] = NONE;
        p
    }

    /// Attach `x` on the edge above `y` through the free node `p`.
    fn graft(&mut self, x: usize, y: usize, p: usize) {
        let gy = self.parent[y];
        self.children[p] = [y, x];
        self.parent[y] = p;
        self.parent[x] = p;
        if gy == NONE {
            self.root = p;
            self.parent[p] = NONE;
        } else {
            self.replace_child(gy, y, p);
            self.parent[p] = gy;
        }
    }

    fn is_ancestor(&self, a: usize, mut x: usize) -> bool {
        while x != NONE {
            if x == a {
                return true;
            }
            x = self.parent[x];
        }
        false
    }

    fn relocate_leaf<R: Rng>(&mut self, rng: &mut R) -> bool {
        if self.k < 3 {
            return false;
        }
        let x = rng.gen_range(0..self.k);
        let p = self.prune(x);
        let targets: Vec<usize> = (0..self.parent.len()).filter(|&y| y != x && y != p).collect();
        let y = *targets.choose(rng).unwrap();
        self.graft(x, y, p);
        true
    }

    fn swap_subtrees<R: Rng>(&mut self, rng: &mut R) -> bool {
        if self.k < 4 {
            return false;
        }
        let m = self.parent.len();
        let x = rng.gen_range(0..m);
        let y = rng.gen_range(0..m);
        if x == self.root || y == self.root || x == y {
            return false;
        }
        let (px, py) = (self.parent[x], self.parent[y]);
        if px == py || self.is_ancestor(x, y) || self.is_ancestor(y, x) {
            return false;
        }
        self.replace_child(px, x, y);
        self.replace_child(py, y, x);
        self.parent[x] = py;
        self.parent[y] = px;
        true
    }
}

/// A binary tree over leaf indices, for building decompositions by hand.
#[derive(Clone, Debug)]
pub enum Nested {
    Leaf(usize),
    Pair(Box<Nested>, Box<Nested>),
}

impl Nested {
    pub fn pair(a: Nested, b: Nested) -> Nested {
        Nested::Pair(Box::new(a), Box::new(b))
    }
}

/// The construction behind `rw ≤ ⌈n/3⌉`: split the vertices into thirds,
/// hang each third off a caterpillar, and join the three at one node. One
/// side of every cut lies inside a single third.
pub fn three_thirds(n: usize, domain: &[usize]) -> RankDecomposition {
    let m = domain.len();
    assert!(m >= 1);
    let sets: Vec<Vec<usize>> = domain.iter().map(|&v| vec![v]).collect();
    if m < 4 {
        return RankDecomposition::caterpillar(n, &sets);
    }
    let t1 = m.div_ceil(3);
    let t2 = (m - t1).div_ceil(2);
    let comb = |lo: usize, hi: usize| {
        let mut t = Nested::Leaf(lo);
        for l in lo + 1..hi {
            t = Nested::pair(t, Nested::Leaf(l));
        }
        t
    };
    let tree = Nested::pair(comb(0, t1), Nested::pair(comb(t1, t1 + t2), comb(t1 + t2, m)));
    RankDecomposition::from_nested(n, &sets, &tree)
}

/// Seed for focused decompositions: one leaf per special vertex, with
/// every other vertex in the first leaf. Every cut then has a side made
/// of special vertices only, at most `|S| − 1` of them.
pub fn star_focused(n: usize, domain: &VertexSet, special: &VertexSet) -> RankDecomposition {
    let specials: Vec<usize> = special.intersection(domain).collect();
    assert!(!specials.is_empty(), "focused decomposition needs a special vertex");
    let mut sets: Vec<Vec<usize>> = specials.iter().map(|&s| vec![s]).collect();
    sets[0].extend(domain.ones().filter(|v| !special.contains(*v)));
    sets[0].sort_unstable();
    RankDecomposition::caterpillar(n, &sets)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub steps: usize,
    pub seed: u64,
    /// Geometric cooling factor per step.
    pub cooling: f64,
    /// Target acceptance rate of worsening moves at the initial temperature.
    pub initial_acceptance: f64,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig { steps: 100_000, seed: 0, cooling: 0.999, initial_acceptance: 0.5 }
    }
}

impl AnnealConfig {
    pub fn with_steps(steps: usize, seed: u64) -> AnnealConfig {
        AnnealConfig { steps, seed, ..AnnealConfig::default() }
    }
}

/// Scores cuts of one graph restricted to one domain, memoized per side.
pub struct CutScorer<'g> {
    g: &'g Graph,
    within: VertexSet,
    objective: Objective,
    anchor: Option<usize>,
    cache: HashMap<VertexSet, usize>,
}

impl<'g> CutScorer<'g> {
    pub fn new(g: &'g Graph, within: VertexSet, objective: Objective) -> CutScorer<'g> {
        let anchor = within.ones().next();
        CutScorer { g, within, objective, anchor, cache: HashMap::new() }
    }

    pub fn score(&mut self, a: &VertexSet) -> usize {
        // both sides of a cut score the same; key on the side without the anchor
        let key = match self.anchor {
            Some(v) if a.contains(v) => {
                let mut c = self.within.clone();
                c.difference_with(a);
                c
            }
            _ => a.clone(),
        };
        if let Some(&s) = self.cache.get(&key) {
            return s;
        }
        let s = self.objective.score(self.g, &key, &self.within);
        self.cache.insert(key, s);
        s
    }

    /// `(max, tie-break)`: the maximum score plus the mean score scaled
    /// into `[0, 1)`.
    fn energy(&mut self, rd: &RankDecomposition) -> (usize, f64) {
        let cuts = rd.cuts();
        if cuts.is_empty() {
            return (0, 0.0);
        }
        let scores: Vec<usize> = cuts.iter().map(|a| self.score(a)).collect();
        let max = *scores.iter().max().unwrap();
        let sum: usize = scores.iter().sum();
        (max, max as f64 + sum as f64 / (scores.len() as f64 * (max as f64 + 1.0)))
    }

    /// Lowest width any decomposition can have: 1 as soon as an edge lies
    /// inside the domain (its endpoint's leaf cut crosses it).
    fn lower_bound(&self, rd: &RankDecomposition) -> usize {
        let dom = &self.within;
        let has_edge = dom.ones().any(|v| self.g.neighborhood(v).intersection(dom).next().is_some());
        // with a single leaf there are no cuts at all
        usize::from(has_edge && rd.num_leaves() >= 2)
    }
}

enum Moves<'a> {
    Standard,
    Focused { movable: Vec<usize>, special: &'a VertexSet },
}

fn propose<R: Rng>(rd: &RankDecomposition, moves: &Moves<'_>, rng: &mut R) -> Option<RankDecomposition> {
    let mut next = rd.clone();
    let kinds = match moves {
        Moves::Focused { movable, .. } if !movable.is_empty() => 3,
        _ => 2,
    };
    let changed = match rng.gen_range(0..kinds) {
        0 => next.relocate_leaf(rng),
        1 => next.swap_subtrees(rng),
        _ => {
            let Moves::Focused { movable, special } = moves else { unreachable!() };
            let v = *movable.choose(rng).unwrap();
            let to = rng.gen_range(0..next.k);
            debug_assert!(!special.contains(v));
            if next.assign[v] == to {
                false
            } else {
                // never empty a leaf
                let from = next.assign[v];
                let others = next.assign.iter().filter(|&&l| l == from).count();
                if others == 1 {
                    false
                } else {
                    next.assign[v] = to;
                    true
                }
            }
        }
    };
    changed.then_some(next)
}

fn anneal(
    start: RankDecomposition,
    scorer: &mut CutScorer<'_>,
    moves: &Moves<'_>,
    cfg: &AnnealConfig,
) -> RankDecomposition {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let lb = scorer.lower_bound(&start);
    let mut cur = start;
    let mut cur_e = scorer.energy(&cur);
    let mut best = cur.clone();
    let mut best_e = cur_e;
    if cur_e.0 <= lb || cfg.steps == 0 {
        return best;
    }

    // initial temperature: mean worsening step over a probe of random moves
    let mut worse = Vec::new();
    for _ in 0..200 {
        if let Some(p) = propose(&cur, moves, &mut rng) {
            let e = scorer.energy(&p);
            if e.1 > cur_e.1 {
                worse.push(e.1 - cur_e.1);
            }
        }
    }
    let mean = if worse.is_empty() { 0.5 } else { worse.iter().sum::<f64>() / worse.len() as f64 };
    let mut temp = mean / (1.0 / cfg.initial_acceptance).ln();

    for _ in 0..cfg.steps {
        temp *= cfg.cooling;
        let Some(next) = propose(&cur, moves, &mut rng) else { continue };
        let e = scorer.energy(&next);
        let delta = e.1 - cur_e.1;
        if delta <= 0.0 || (temp > 0.0 && rng.gen::<f64>() < (-delta / temp).exp()) {
            cur = next;
            cur_e = e;
            if cur_e.1 < best_e.1 {
                best = cur.clone();
                best_e = cur_e;
                if best_e.0 <= lb {
                    break;
                }
            }
        }
    }
    best
}

/// Simulated annealing over rank decompositions of `g`, started from the
/// three-thirds construction and never returning anything worse.
pub fn anneal_rank_decomposition(g: &Graph, objective: Objective, steps: usize, seed: u64) -> RankDecomposition {
    anneal_rank_decomposition_within(g, &g.full_set(), objective, &AnnealConfig::with_steps(steps, seed))
}

pub fn anneal_rank_decomposition_within(
    g: &Graph,
    within: &VertexSet,
    objective: Objective,
    cfg: &AnnealConfig,
) -> RankDecomposition {
    let domain: Vec<usize> = within.ones().collect();
    let start = three_thirds(g.n(), &domain);
    let mut scorer = CutScorer::new(g, within.clone(), objective);
    anneal(start, &mut scorer, &Moves::Standard, cfg)
}

/// Focused decomposition: one leaf per special vertex, other vertices
/// assigned to leaves freely. Started from [`star_focused`], so the
/// result scores below `|S|`.
pub fn anneal_focused_decomposition(
    g: &Graph,
    within: &VertexSet,
    special: &VertexSet,
    objective: Objective,
    cfg: &AnnealConfig,
) -> RankDecomposition {
    let start = star_focused(g.n(), within, special);
    let movable: Vec<usize> = within.ones().filter(|&v| !special.contains(v)).collect();
    let mut scorer = CutScorer::new(g, within.clone(), objective);
    anneal(start, &mut scorer, &Moves::Focused { movable, special }, cfg)
}

/// Result of [`focused_partition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FocusedPartition {
    pub side: VertexSet,
    pub complement: VertexSet,
    pub score: usize,
}

/// Balanced partition of `within` for weights supported on the special
/// set, taken from an annealed focused decomposition.
pub fn focused_partition(
    g: &Graph,
    within: &VertexSet,
    special: &VertexSet,
    weights: &[f64],
    objective: Objective,
    cfg: &AnnealConfig,
) -> Result<FocusedPartition> {
    let count = special.intersection(within).count();
    if count == 0 {
        return Err(Error::DegenerateWeights);
    }
    if count == 1 {
        let mut empty = within.clone();
        empty.clear();
        return Ok(FocusedPartition { side: within.clone(), complement: empty, score: 0 });
    }
    let rd = anneal_focused_decomposition(g, within, special, objective, cfg);
    let (side, complement) = rd.balanced_partition(weights, within)?;
    let score = objective.score(g, &side, within);
    Ok(FocusedPartition { side, complement, score })
}

/// Minimum width over all decompositions of a small graph, by enumerating
/// every unrooted binary tree with labelled leaves (`(2n−5)!!` of them).
///
/// Vertex 0 is pinned next to the root and the remaining leaves are
/// inserted one at a time into every edge of the growing tree.
pub fn exhaustive_rank_width(g: &Graph, objective: Objective) -> (usize, RankDecomposition) {
    let n = g.n();
    assert!((1..=10).contains(&n), "exhaustive search is for tiny graphs");
    let sets: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    if n <= 3 {
        let rd = RankDecomposition::caterpillar(n, &sets);
        return (rd.score(g, objective), rd);
    }
    let mut scorer = CutScorer::new(g, g.full_set(), objective);
    // rooted trees over leaves 1..n, then pair with leaf 0
    let mut best: Option<(usize, RankDecomposition)> = None;
    let mut trees = vec![Nested::Leaf(1)];
    for leaf in 2..n {
        let mut next = Vec::new();
        for t in &trees {
            insert_everywhere(t, leaf, &mut next);
        }
        trees = next;
    }
    for t in trees {
        let rd = RankDecomposition::from_nested(n, &sets, &Nested::pair(Nested::Leaf(0), t));
        let (w, _) = scorer.energy(&rd);
        if best.as_ref().is_none_or(|(b, _)| w < *b) {
            best = Some((w, rd));
        }
    }
    best.unwrap()
}

fn insert_everywhere(t: &Nested, leaf: usize, out: &mut Vec<Nested>) {
    out.push(Nested::pair(t.clone(), Nested::Leaf(leaf)));
    if let Nested::Pair(a, b) = t {
        let mut left = Vec::new();
        insert_everywhere(a, leaf, &mut left);
        for x in left {
            out.push(Nested::pair(x, (**b).clone()));
        }
        let mut right = Vec::new();
        insert_everywhere(b, leaf, &mut right);
        for y in right {
            out.push(Nested::pair((**a).clone(), y));
        }
    }
}

/// Serialized form: unrooted tree edges plus the vertex set of each leaf.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankDecompositionFile {
    pub num_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub leaves: Vec<Vec<usize>>,
}

impl RankDecomposition {
    pub fn to_file(&self) -> RankDecompositionFile {
        RankDecompositionFile { num_vertices: self.n, edges: self.tree_edges(), leaves: self.leaf_sets() }
    }

    /// Rebuild from an unrooted tree by rooting it at its first edge.
    pub fn from_file(f: &RankDecompositionFile) -> Result<RankDecomposition> {
        let k = f.leaves.len();
        let bad = |m: &str| Error::InvalidDecomposition(m.to_string());
        if k == 0 {
            return Err(bad("no leaves"));
        }
        if k == 1 {
            return Ok(RankDecomposition::caterpillar(f.num_vertices, &f.leaves));
        }
        let nodes = 2 * k - 2;
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in &f.edges {
            if a >= nodes || b >= nodes {
                return Err(bad("edge endpoint out of range"));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let (a, b) = *f.edges.first().ok_or_else(|| bad("no edges"))?;
        fn nest(adj: &[Vec<usize>], x: usize, from: usize, k: usize, depth: usize) -> Result<Nested> {
            if depth > adj.len() {
                return Err(Error::InvalidDecomposition("cycle in tree".into()));
            }
            if x < k {
                return Ok(Nested::Leaf(x));
            }
            let next: Vec<usize> = adj[x].iter().copied().filter(|&y| y != from).collect();
            if next.len() != 2 {
                return Err(Error::InvalidDecomposition(format!("node {x} is not cubic")));
            }
            Ok(Nested::pair(nest(adj, next[0], x, k, depth + 1)?, nest(adj, next[1], x, k, depth + 1)?))
        }
        let tree = Nested::pair(nest(&adj, a, b, k, 0)?, nest(&adj, b, a, k, 0)?);
        let rd = RankDecomposition::from_nested(f.num_vertices, &f.leaves, &tree);
        if rd.post_order().len() != 2 * k - 1 {
            return Err(bad("tree does not reach every node"));
        }
        Ok(rd)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("serializes")
    }

    pub fn from_json(s: &str) -> Result<RankDecomposition> {
        RankDecomposition::from_file(&serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all(g: &Graph) -> VertexSet {
        g.full_set()
    }

    #[test]
    fn three_thirds_is_valid_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..20 {
            let g = Graph::random(n, 0.5, &mut rng);
            let dom: Vec<usize> = (0..n).collect();
            let rd = three_thirds(n, &dom);
            rd.validate(&all(&g), None).unwrap();
            assert!(rd.mixed_width(&g) <= n.div_ceil(3), "n = {n}");
            assert!(rd.width(&g) <= n.div_ceil(3));
        }
    }

    #[test]
    fn cut_sides_have_equal_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = Graph::random(12, 0.4, &mut rng);
        let rd = anneal_rank_decomposition(&g, Objective::CutRank, 500, 3);
        for a in rd.cuts() {
            let mut b = g.full_set();
            b.difference_with(&a);
            assert_eq!(g.cut_rank(&a), g.cut_rank(&b));
        }
    }

    #[test]
    fn moves_keep_the_tree_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Graph::random(9, 0.5, &mut rng);
        let mut rd = three_thirds(9, &(0..9).collect::<Vec<_>>());
        for _ in 0..2000 {
            if rng.gen_bool(0.5) {
                rd.relocate_leaf(&mut rng);
            } else {
                rd.swap_subtrees(&mut rng);
            }
            rd.validate(&all(&g), None).unwrap();
            assert_eq!(rd.cuts().len(), 2 * 9 - 3);
        }
    }

    #[test]
    fn paths_and_cliques_have_width_one() {
        for n in 3..=12 {
            let p = Graph::path(n);
            assert_eq!(anneal_rank_decomposition(&p, Objective::CutRank, 100_000, 1).width(&p), 1, "P{n}");
            let k = Graph::complete(n);
            assert_eq!(anneal_rank_decomposition(&k, Objective::CutRank, 1000, 1).width(&k), 1, "K{n}");
        }
        for n in 3..=6 {
            assert_eq!(exhaustive_rank_width(&Graph::path(n), Objective::CutRank).0, 1);
        }
    }

    #[test]
    fn exhaustive_enumerates_every_tree() {
        // (2n−5)!! unrooted trees: check the count for n = 7
        let mut trees = vec![Nested::Leaf(1)];
        for leaf in 2..7 {
            let mut next = Vec::new();
            for t in &trees {
                insert_everywhere(t, leaf, &mut next);
            }
            trees = next;
        }
        assert_eq!(trees.len(), 9 * 7 * 5 * 3);
        // cycle C6 has rank-width 2
        assert_eq!(exhaustive_rank_width(&Graph::cycle(6), Objective::CutRank).0, 2);
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = Graph::random(10, 0.5, &mut rng);
        let rd = anneal_rank_decomposition(&g, Objective::Mixed, 300, 9);
        let back = RankDecomposition::from_json(&rd.to_json()).unwrap();
        back.validate(&all(&g), None).unwrap();
        let mut c1: Vec<Vec<usize>> = rd.cuts().iter().map(|c| c.ones().collect()).collect();
        let mut c2: Vec<Vec<usize>> = back.cuts().iter().map(|c| c.ones().collect()).collect();
        // the same unrooted tree, possibly rooted elsewhere: compare cuts up to complement
        let canon = |mut v: Vec<Vec<usize>>| {
            for c in v.iter_mut() {
                if c.contains(&0) {
                    *c = (0..10).filter(|x| !c.contains(x)).collect();
                }
            }
            v.sort();
            v
        };
        c1 = canon(c1);
        c2 = canon(c2);
        assert_eq!(c1, c2);
    }

    #[test]
    fn balanced_partition_on_a_path() {
        let g = Graph::path(4);
        let (_, rd) = exhaustive_rank_width(&g, Objective::CutRank);
        let w = vec![1.0; 4];
        let (a, b) = rd.balanced_partition(&w, &g.full_set()).unwrap();
        assert_eq!(a.count_ones(..), 2);
        assert_eq!(b.count_ones(..), 2);
    }

    #[test]
    fn point_mass_weight() {
        let g = Graph::path(5);
        let rd = three_thirds(5, &[0, 1, 2, 3, 4]);
        let mut w = vec![0.0; 5];
        w[3] = 1.0;
        let (a, b) = rd.balanced_partition(&w, &g.full_set()).unwrap();
        let heavy = if a.contains(3) { &a } else { &b };
        // the chosen edge is the leaf edge of vertex 3
        assert!(heavy.count_ones(..) == 1 || heavy.count_ones(..) == 4);
        assert!(matches!(rd.balanced_partition(&[0.0; 5], &g.full_set()), Err(Error::DegenerateWeights)));
    }

    #[test]
    fn balanced_partition_respects_two_thirds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let n = rng.gen_range(3..13);
            let g = Graph::random(n, 0.4, &mut rng);
            let rd = anneal_rank_decomposition(&g, Objective::CutRank, 2000, 7);
            let w = vec![1.0; n];
            let (a, b) = rd.balanced_partition(&w, &g.full_set()).unwrap();
            let big = a.count_ones(..).max(b.count_ones(..)) as f64;
            assert!(big <= 2.0 / 3.0 * n as f64 + 1e-9);
        }
    }

    #[test]
    fn focused_width_below_special_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let n = rng.gen_range(6..16);
            let g = Graph::random(n, 0.5, &mut rng);
            let special = g.set_of((0..n).filter(|_| rng.gen_bool(0.4)).take(4));
            let s = special.count_ones(..);
            if s < 2 {
                continue;
            }
            let rd = anneal_focused_decomposition(&g, &g.full_set(), &special, Objective::CutRank, &AnnealConfig::with_steps(500, 1));
            rd.validate(&g.full_set(), Some(&special)).unwrap();
            assert!(rd.width(&g) < s);
            let w: Vec<f64> = (0..n).map(|v| if special.contains(v) { 1.0 } else { 0.0 }).collect();
            let p = focused_partition(&g, &g.full_set(), &special, &w, Objective::CutRank, &AnnealConfig::with_steps(500, 1)).unwrap();
            assert!(p.score < s);
        }
    }

    #[test]
    fn single_special_vertex_gives_trivial_split() {
        let g = Graph::complete(5);
        let special = g.set_of([2]);
        let w = vec![0.0, 0.0, 1.0, 0.0, 0.0];
        let p = focused_partition(&g, &g.full_set(), &special, &w, Objective::CutRank, &AnnealConfig::default()).unwrap();
        assert_eq!(p.score, 0);
        assert_eq!(p.side, g.full_set());
    }
}
