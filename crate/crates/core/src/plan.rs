//! Cut-tree planning: choose a tree of cuts from a rank decomposition,
//! count its terms exactly, and execute it.
//!
//! A plan node owns a vertex set `U` of the diagram. It is a leaf when `U`
//! holds at most one non-Clifford spider (evaluated by simplification), a
//! split when `U` is disconnected (components evaluated separately), and
//! otherwise a cut whose `2^w` terms each leave the two sides of the cut
//! disconnected. Leaf evaluations obey
//! `term_count(node) = 2^w · Σ term_count(children)`.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::decomp::RankDecomposition;
use crate::diagram::{ZxDiagram, V};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rules::to_graph_like;
use crate::scalar::Scalar;
use crate::sim::{evaluate_clifford, id_graph, par_map, rank_cut_action, with_pool, CutAction};

pub const ALPHA_TOLERANCE: f64 = 1e-10;
pub const ALPHA_MAX_ITERATIONS: usize = 200;

/// Solve `α = (w + log₂(1 + 2^{−α|a−b|})) / (n − max(a, b))` by fixed-point
/// iteration. This is the exponent with `2^{αn} = 2^w (2^{αa} + 2^{αb})`.
pub fn effective_alpha(w: f64, a: usize, b: usize, n: usize) -> Result<f64> {
    let hi = a.max(b);
    if n <= hi || a + b > n {
        return Err(Error::InvalidArgument(format!("effective_alpha needs a + b ≤ n and n > max(a, b); got a={a} b={b} n={n}")));
    }
    let m = (n - hi) as f64;
    let d = a.abs_diff(b) as f64;
    let f = |alpha: f64| (w + (1.0 + (-alpha * d).exp2()).log2()) / m;
    let mut alpha = (w + 1.0) / m;
    let mut step = f64::INFINITY;
    for _ in 0..ALPHA_MAX_ITERATIONS {
        let next = f(alpha);
        step = (next - alpha).abs();
        alpha = next;
        if step <= ALPHA_TOLERANCE {
            return Ok(alpha);
        }
    }
    Err(Error::NonConvergence { iterations: ALPHA_MAX_ITERATIONS, last_step: step })
}

/// `log₂ x` for arbitrarily large `x`; `-∞` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        x.to_f64().map_or(f64::INFINITY, f64::log2)
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().log2() + shift as f64
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutNode {
    pub vertices: Vec<V>,
    pub nc: usize,
    /// `None` for leaves (no children) and component splits.
    pub action: Option<CutAction>,
    pub children: Vec<CutNode>,
    #[serde(with = "decimal")]
    pub term_count: BigUint,
}

impl CutNode {
    fn leaf(vertices: Vec<V>, nc: usize) -> CutNode {
        CutNode { vertices, nc, action: None, children: Vec::new(), term_count: BigUint::one() }
    }

    pub fn is_leaf(&self) -> bool {
        self.action.is_none() && self.children.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    /// Largest cut score on the tree.
    pub fn max_width(&self) -> usize {
        let own = self.action.as_ref().map_or(0, |a| a.score);
        self.children.iter().map(CutNode::max_width).fold(own, usize::max)
    }

    /// Recompute term counts bottom-up from the structure alone.
    pub fn recount(&self) -> BigUint {
        if self.is_leaf() {
            return BigUint::one();
        }
        let sum: BigUint = self.children.iter().map(CutNode::recount).sum();
        match &self.action {
            Some(a) => sum << a.num_terms_log2(),
            None => sum,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutTree {
    pub structure_hash: String,
    pub nc: usize,
    #[serde(with = "decimal")]
    pub term_count: BigUint,
    pub alpha: f64,
    pub root: CutNode,
}

impl CutTree {
    pub fn terms_log2(&self) -> f64 {
        log2_big(&self.term_count)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("cut tree serializes")
    }

    pub fn from_json(s: &str) -> Result<CutTree> {
        Ok(serde_json::from_str(s)?)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub temperature: f64,
    pub trees: usize,
    pub seed: u64,
    /// Use greedy mixed decompositions of each cut (plain bipartite
    /// decompositions otherwise).
    pub mixed: bool,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig { temperature: 0.05, trees: 5000, seed: 0, mixed: true }
    }
}

struct Candidate {
    action: CutAction,
    sides: Vec<VertexSet>,
    alpha: Option<f64>,
    larger_side_nc: usize,
}

struct Planner<'a> {
    g: Graph,
    nc_mask: VertexSet,
    cuts: Vec<VertexSet>,
    cfg: &'a PlannerConfig,
    memo: HashMap<VertexSet, Rc<Vec<Candidate>>>,
}

impl Planner<'_> {
    fn nc_of(&self, u: &VertexSet) -> usize {
        u.intersection(&self.nc_mask).count()
    }

    fn candidates(&mut self, u: &VertexSet) -> Rc<Vec<Candidate>> {
        if let Some(c) = self.memo.get(u) {
            return c.clone();
        }
        let first = u.minimum().expect("non-empty set");
        let mut sides: Vec<VertexSet> = Vec::new();
        for cut in &self.cuts {
            let mut x = cut.clone();
            x.intersect_with(u);
            if x.contains(first) {
                // orient so the side without `first` is the key
                let mut y = u.clone();
                y.difference_with(&x);
                x = y;
            }
            if !x.is_clear() && x.count_ones(..) < u.count_ones(..) && !sides.contains(&x) {
                sides.push(x);
            }
        }
        if sides.is_empty() {
            for v in u.ones().skip(1) {
                sides.push(self.g.set_of([v]));
            }
        }
        let n = self.nc_of(u);
        let list: Vec<Candidate> = sides
            .into_iter()
            .map(|x| {
                let action = rank_cut_action(&self.g, &x, u, self.cfg.mixed);
                let mut xs = x.clone();
                let mut ys = u.clone();
                ys.difference_with(&x);
                for &v in &action.deleted {
                    xs.set(v, false);
                    ys.set(v, false);
                }
                let (a, b) = (self.nc_of(&xs), self.nc_of(&ys));
                let alpha = if n > a.max(b) { effective_alpha(action.score as f64, a, b, n).ok() } else { None };
                let sides = [xs, ys].into_iter().filter(|s| !s.is_clear()).collect();
                Candidate { action, sides, alpha, larger_side_nc: a.max(b) }
            })
            .collect();
        let list = Rc::new(list);
        self.memo.insert(u.clone(), list.clone());
        list
    }

    fn choose(&self, cands: &[Candidate], rng: &mut ChaCha8Rng) -> usize {
        let best = cands.iter().filter_map(|c| c.alpha).fold(f64::INFINITY, f64::min);
        if best.is_finite() {
            let weights: Vec<f64> =
                cands.iter().map(|c| c.alpha.map_or(0.0, |a| (-(a - best) / self.cfg.temperature).exp())).collect();
            let total: f64 = weights.iter().sum();
            let mut r = rng.gen::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if *w > 0.0 {
                    if r < *w {
                        return i;
                    }
                    r -= w;
                }
            }
            return weights.iter().rposition(|&w| w > 0.0).unwrap();
        }
        (0..cands.len()).min_by_key(|&i| (cands[i].action.score, cands[i].larger_side_nc, i)).unwrap()
    }

    fn sample(&mut self, u: &VertexSet, rng: &mut ChaCha8Rng) -> CutNode {
        let nc = self.nc_of(u);
        let vertices: Vec<V> = u.ones().collect();
        if nc <= 1 {
            return CutNode::leaf(vertices, nc);
        }
        let comps = self.g.components_within(u);
        if comps.len() > 1 {
            let children: Vec<CutNode> = comps.iter().map(|c| self.sample(c, rng)).collect();
            let term_count = children.iter().map(|c| &c.term_count).sum();
            return CutNode { vertices, nc, action: None, children, term_count };
        }
        let cands = self.candidates(u);
        let c = &cands[self.choose(&cands, rng)];
        let mut children: Vec<CutNode> = c.sides.iter().map(|s| self.sample(s, rng)).collect();
        if children.is_empty() {
            children.push(CutNode::leaf(Vec::new(), 0));
        }
        let sum: BigUint = children.iter().map(|c| &c.term_count).sum();
        let term_count = sum << c.action.num_terms_log2();
        CutNode { vertices, nc, action: Some(c.action.clone()), children, term_count }
    }
}

fn prepared(d: &ZxDiagram) -> ZxDiagram {
    if d.is_graph_like() {
        d.clone()
    } else {
        to_graph_like(d)
    }
}

/// Sample `cfg.trees` cut trees, picking at each node a cut of `rd` with
/// probability `∝ exp(−α_eff / T)`, and return the one with fewest terms.
pub fn build_cut_tree(d: &ZxDiagram, rd: &RankDecomposition, cfg: &PlannerConfig) -> CutTree {
    let d = prepared(d);
    let (g, present) = id_graph(&d);
    let nc_mask = g.set_of(d.vertices().filter(|&v| d.is_non_clifford(v)));
    let nc = d.nc_count();
    let mut cuts = if rd.num_graph_vertices() == g.n() { rd.cuts() } else { Vec::new() };
    for c in &mut cuts {
        c.grow(g.n());
    }
    let mut planner = Planner { g, nc_mask, cuts, cfg, memo: HashMap::new() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<CutNode> = None;
    for _ in 0..cfg.trees.max(1) {
        let t = planner.sample(&present, &mut rng);
        if best.as_ref().is_none_or(|b| t.term_count < b.term_count) {
            best = Some(t);
        }
        if nc <= 1 {
            break;
        }
    }
    let root = best.unwrap();
    let term_count = root.term_count.clone();
    let alpha = if nc == 0 { 0.0 } else { log2_big(&term_count) / nc as f64 };
    CutTree { structure_hash: d.structure_hash(), nc, term_count, alpha, root }
}

/// Outcome of running a plan.
#[derive(Clone, Debug, PartialEq)]
pub struct Execution {
    pub value: Scalar,
    pub amplitude: Complex64,
    /// Clifford leaf evaluations performed.
    pub leaves: u64,
}

fn run(node: &CutNode, d: &ZxDiagram, jobs: usize) -> Result<(Scalar, u64)> {
    if node.is_leaf() {
        return Ok((evaluate_clifford(d)?, 1));
    }
    let product = |t: &ZxDiagram| -> Result<(Scalar, u64)> {
        let mut value = *t.scalar();
        let mut leaves = 0;
        for c in &node.children {
            let (v, l) = run(c, &t.induced(&c.vertices), jobs)?;
            value = value * v;
            leaves += l;
        }
        Ok((value, leaves))
    };
    let Some(action) = &node.action else {
        return product(d);
    };
    let parts = par_map(jobs, 1u64 << action.num_terms_log2(), |i| product(&action.term(d, i)))?;
    let mut value = Scalar::zero();
    let mut leaves = 0;
    for (v, l) in parts {
        value += v;
        leaves += l;
    }
    Ok((value, leaves))
}

/// Evaluate `d` by following `ct`. Fails with [`Error::PlanMismatch`] if
/// `d` is not the diagram the plan was built for.
pub fn execute_cut_tree(d: &ZxDiagram, ct: &CutTree, jobs: usize) -> Result<Execution> {
    if !d.is_closed() {
        return Err(Error::OpenDiagram);
    }
    let d = prepared(d);
    if d.structure_hash() != ct.structure_hash {
        return Err(Error::PlanMismatch);
    }
    let (value, leaves) = with_pool(jobs, || run(&ct.root, &d, jobs))?;
    Ok(Execution { value, amplitude: value.to_complex(), leaves })
}

/// `term_count` is zero only for malformed trees.
pub fn is_consistent(ct: &CutTree) -> bool {
    !ct.term_count.is_zero() && ct.root.recount() == ct.term_count
}
