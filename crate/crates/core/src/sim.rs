//! Recursive cut-and-sum simulation of closed diagrams.
//!
//! Four variants: separators from a tree decomposition (vertex cuts) or
//! from a rank decomposition (edge-stripping bipartite sums, optionally
//! mixed with vertex deletions), each either recursing down to single
//! spiders or stopping as soon as the remaining diagram is Clifford.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::decomp::{anneal_rank_decomposition_within, tree_decomposition_heuristic, AnnealConfig, Objective};
use crate::decomp::{RankDecomposition, TreeDecomposition};
use crate::diagram::{ZxDiagram, V};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::phase::Phase;
use crate::rules::{full_reduce, to_graph_like};
use crate::scalar::Scalar;

/// `log_{3/2} 4`.
pub fn gamma() -> f64 {
    4f64.ln() / 1.5f64.ln()
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    TreeWidth,
    RankWidth,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: Mode,
    /// Stop at Clifford diagrams and weight only non-Clifford spiders.
    pub clifford_base: bool,
    /// Rank-width mode: use greedy mixed decompositions of each cut.
    pub mixed: bool,
    /// With `clifford_base`, diagrams with at most this many non-Clifford
    /// spiders are expanded by plain vertex cuts instead of separators.
    pub hybrid_threshold: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Run `full_reduce` before starting and after every cut.
    pub simplify: bool,
    /// Recompute the decomposition at every level instead of once.
    pub recompute_per_level: bool,
    pub anneal_steps: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            mode: Mode::RankWidth,
            clifford_base: true,
            mixed: true,
            hybrid_threshold: 0,
            seed: 0,
            jobs: 1,
            simplify: true,
            recompute_per_level: false,
            anneal_steps: AnnealConfig::default().steps,
        }
    }
}

impl SimConfig {
    /// The numbered variants: 1 tree-width, 2 tree-width with Clifford
    /// leaves, 3 rank-width, 4 rank-width with Clifford leaves.
    pub fn algorithm(k: u8) -> SimConfig {
        let (mode, clifford_base) = match k {
            1 => (Mode::TreeWidth, false),
            2 => (Mode::TreeWidth, true),
            3 => (Mode::RankWidth, false),
            4 => (Mode::RankWidth, true),
            _ => panic!("algorithms are numbered 1 to 4"),
        };
        SimConfig { mode, clifford_base, mixed: false, ..SimConfig::default() }
    }

    pub fn algorithm_name(&self) -> String {
        let base = match (self.mode, self.clifford_base) {
            (Mode::TreeWidth, false) => "treewidth",
            (Mode::TreeWidth, true) => "treewidth-clifford",
            (Mode::RankWidth, false) => "rankwidth",
            (Mode::RankWidth, true) => "rankwidth-clifford",
        };
        if self.mixed && self.mode == Mode::RankWidth {
            format!("{base}-mixed")
        } else {
            base.to_string()
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub n_spiders: usize,
    pub nc: usize,
    /// Leaf evaluations performed (terms that reached a base case).
    pub leaves: u64,
    pub max_depth: usize,
    /// Largest cut score (or separator size) used at each recursion depth.
    pub widths_per_level: Vec<usize>,
    pub width_used: usize,
    /// `N^{γ·w}` (rank-width) or `N^{w}` (tree-width), with `N` the
    /// non-Clifford count for the Clifford-leaf variants and the spider
    /// count otherwise.
    pub leaf_bound: f64,
    pub within_bound: bool,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimResult {
    pub value: Scalar,
    pub amplitude: Complex64,
    pub stats: SimStats,
}

/// The JSON record emitted per run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub algorithm: String,
    pub n_spiders: usize,
    pub nc: usize,
    pub width_used: usize,
    pub leaves: u64,
    pub alpha: f64,
    pub wall_time_ms: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub seed: u64,
}

impl SimResult {
    pub fn record(&self, cfg: &SimConfig) -> RunRecord {
        let s = &self.stats;
        let alpha = if s.nc == 0 || s.leaves == 0 { 0.0 } else { (s.leaves as f64).log2() / s.nc as f64 };
        RunRecord {
            algorithm: cfg.algorithm_name(),
            n_spiders: s.n_spiders,
            nc: s.nc,
            width_used: s.width_used,
            leaves: s.leaves,
            alpha,
            wall_time_ms: s.wall_time_ms,
            amplitude_re: self.amplitude.re,
            amplitude_im: self.amplitude.im,
            seed: cfg.seed,
        }
    }
}

/// One cut expanded into `2^{|deleted|}·4^{|pairs|}` terms: vertex cuts on
/// `deleted`, then a bipartite sum per pair removing the remaining edges
/// between `side` and the rest.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutAction {
    pub deleted: Vec<V>,
    pub pairs: Vec<(Vec<V>, Vec<V>)>,
    /// Vertices on the first side of the cut (empty for pure vertex cuts).
    pub side: Vec<V>,
    pub score: usize,
}

impl CutAction {
    pub fn vertex_cut(deleted: Vec<V>) -> CutAction {
        let score = deleted.len();
        CutAction { deleted, pairs: Vec::new(), side: Vec::new(), score }
    }

    pub fn num_terms_log2(&self) -> usize {
        self.deleted.len() + 2 * self.pairs.len()
    }

    /// Term number `i`, with its coefficient folded into the scalar.
    /// The low bits select the vertex-cut branches, then two bits per pair.
    pub fn term(&self, d: &ZxDiagram, i: u64) -> ZxDiagram {
        let mut t = d.clone();
        let mut bits = i;
        for &v in &self.deleted {
            let p = bits & 1 == 1;
            bits >>= 1;
            let alpha = t.phase(v);
            let deg = t.degree(v) as i32;
            let nbrs: Vec<V> = t.neighbors(v).collect();
            t.remove_vertex(v);
            if p {
                for n in nbrs {
                    t.add_to_phase(n, Phase::pi());
                }
                t.scalar_mut().mul_phase(alpha);
            }
            t.scalar_mut().mul_sqrt2_pow(-deg);
        }
        if self.pairs.is_empty() {
            return t;
        }
        let mut in_side = vec![false; t.capacity()];
        for &v in &self.side {
            in_side[v] = true;
        }
        let cross: Vec<(V, V)> =
            t.edges().into_iter().filter(|&(u, v, _)| in_side[u] != in_side[v]).map(|(u, v, _)| (u, v)).collect();
        debug_assert!(self.covers(&cross));
        for &(u, v) in &cross {
            t.remove_edge(u, v);
        }
        let mut negate = false;
        for (a, b) in &self.pairs {
            let (k, j) = (bits & 1 == 1, bits >> 1 & 1 == 1);
            bits >>= 2;
            if k {
                for &x in a {
                    t.add_to_phase(x, Phase::pi());
                }
            }
            if j {
                for &y in b {
                    t.add_to_phase(y, Phase::pi());
                }
            }
            negate ^= k && j;
        }
        let s = t.scalar_mut();
        s.mul_sqrt2_pow(-(cross.len() as i32) - 2 * self.pairs.len() as i32);
        if negate {
            *s = -*s;
        }
        t
    }

    /// The pairs XOR to exactly the given cross edges.
    fn covers(&self, cross: &[(V, V)]) -> bool {
        let mut count = std::collections::BTreeMap::new();
        for (a, b) in &self.pairs {
            for &x in a {
                for &y in b {
                    *count.entry((x.min(y), x.max(y))).or_insert(0u32) += 1;
                }
            }
        }
        let odd: Vec<(V, V)> = count.into_iter().filter(|&(_, c)| c % 2 == 1).map(|(e, _)| e).collect();
        let mut want: Vec<(V, V)> = cross.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        want.sort_unstable();
        odd == want
    }
}

/// Simple graph on diagram ids (holes stay isolated) and the set of ids in use.
pub fn id_graph(d: &ZxDiagram) -> (Graph, VertexSet) {
    let mut g = Graph::new(d.capacity());
    for (u, v, _) in d.edges() {
        g.add_edge(u, v);
    }
    let present = g.set_of(d.vertices());
    (g, present)
}

/// Mixed (or plain bipartite) decomposition of the cut `(side, rest)` of
/// `within`, as a [`CutAction`].
pub(crate) fn rank_cut_action(g: &Graph, side: &VertexSet, within: &VertexSet, mixed: bool) -> CutAction {
    let side_vec: Vec<V> = side.ones().collect();
    if mixed {
        let mc = g.mixed_decomposition_within(side, within);
        CutAction { deleted: mc.deleted, pairs: mc.pairs, side: side_vec, score: mc.score }
    } else {
        let (m, rows, cols) = g.cut_matrix_within(side, within);
        let bd = m.bipartite_decomposition();
        let pairs: Vec<(Vec<V>, Vec<V>)> = bd
            .pairs
            .into_iter()
            .map(|(a, b)| (a.into_iter().map(|i| rows[i]).collect(), b.into_iter().map(|j| cols[j]).collect()))
            .collect();
        let score = 2 * pairs.len();
        CutAction { deleted: Vec::new(), pairs, side: side_vec, score }
    }
}

/// Evaluate a diagram with at most one non-Clifford spider per component
/// by simplification alone.
pub fn evaluate_clifford(d: &ZxDiagram) -> Result<Scalar> {
    let r = full_reduce(d);
    if r.num_vertices() > 0 {
        return Err(Error::NonConvergentSimplification(format!(
            "{} spiders left after simplifying a diagram with NC = {}",
            r.num_vertices(),
            d.nc_count()
        )));
    }
    Ok(*r.scalar())
}

#[derive(Clone, Debug, Default)]
struct Outcome {
    value: Scalar,
    leaves: u64,
    depth: usize,
    widths: Vec<usize>,
}

impl Outcome {
    fn leaf(value: Scalar) -> Outcome {
        Outcome { value, leaves: 1, depth: 0, widths: Vec::new() }
    }

    fn absorb_widths(&mut self, other: &[usize], offset: usize) {
        for (i, &w) in other.iter().enumerate() {
            let k = i + offset;
            if self.widths.len() <= k {
                self.widths.resize(k + 1, 0);
            }
            self.widths[k] = self.widths[k].max(w);
        }
    }
}

struct Ctx<'a> {
    cfg: &'a SimConfig,
    rd: Option<RankDecomposition>,
    td: Option<TreeDecomposition>,
}

pub(crate) fn par_map<T, F>(jobs: usize, n: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = jobs;
    (0..n).map(f).collect()
}

pub(crate) fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> T {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

impl Ctx<'_> {
    fn weights(&self, d: &ZxDiagram) -> Vec<f64> {
        let mut w = vec![0.0; d.capacity()];
        for v in d.vertices() {
            w[v] = if !self.cfg.clifford_base || d.is_non_clifford(v) { 1.0 } else { 0.0 };
        }
        w
    }

    fn choose_cut(&self, d: &ZxDiagram) -> Result<CutAction> {
        let (g, within) = id_graph(d);
        let w = self.weights(d);
        match self.cfg.mode {
            Mode::TreeWidth => {
                let restricted = self.td.as_ref().map(|td| td.restrict(&within));
                let td = match restricted {
                    Some(td) if !self.cfg.recompute_per_level && td.check_edge_coverage(&g, &within).is_ok() => td,
                    _ => tree_decomposition_heuristic(&g, &within),
                };
                Ok(CutAction::vertex_cut(td.balanced_separator(&g, &w, &within)?))
            }
            Mode::RankWidth => {
                let objective = if self.cfg.mixed { Objective::Mixed } else { Objective::CutRank };
                let fresh;
                let rd = match &self.rd {
                    Some(rd) if !self.cfg.recompute_per_level => rd,
                    _ => {
                        let cfg = AnnealConfig::with_steps(self.cfg.anneal_steps, self.cfg.seed);
                        fresh = anneal_rank_decomposition_within(&g, &within, objective, &cfg);
                        &fresh
                    }
                };
                let (side, _) = rd.balanced_partition(&w, &within)?;
                Ok(rank_cut_action(&g, &side, &within, self.cfg.mixed))
            }
        }
    }

    fn eval(&self, d: ZxDiagram) -> Result<Outcome> {
        let scalar = *d.scalar();
        if scalar.is_zero() {
            return Ok(Outcome { value: Scalar::zero(), ..Outcome::default() });
        }
        if d.num_vertices() == 0 {
            return Ok(Outcome::leaf(scalar));
        }
        let nc = d.nc_count();
        if self.cfg.clifford_base && nc <= 1 {
            return Ok(Outcome::leaf(evaluate_clifford(&d)?));
        }
        if self.cfg.clifford_base && nc <= self.cfg.hybrid_threshold {
            return self.expand_exhaustively(d);
        }
        let comps = d.components();
        if comps.len() > 1 {
            let parts: Vec<Outcome> = comps.iter().map(|c| self.eval(d.induced(c))).collect::<Result<_>>()?;
            let mut out = Outcome { value: scalar, ..Outcome::default() };
            for p in parts {
                out.value = out.value * p.value;
                out.leaves += p.leaves;
                out.depth = out.depth.max(p.depth);
                out.absorb_widths(&p.widths, 0);
            }
            return Ok(out);
        }
        if d.num_vertices() == 1 {
            let v = d.vertices().next().unwrap();
            return Ok(Outcome::leaf(scalar * Scalar::one_plus_phase(d.phase(v))));
        }
        let action = self.choose_cut(&d)?;
        self.branch(&d, &action)
    }

    fn branch(&self, d: &ZxDiagram, action: &CutAction) -> Result<Outcome> {
        let n = 1u64 << action.num_terms_log2();
        let parts = par_map(self.cfg.jobs, n, |i| {
            let mut t = action.term(d, i);
            if self.cfg.simplify {
                t = full_reduce(&t);
            }
            self.eval(t)
        })?;
        let mut out = Outcome { value: Scalar::zero(), widths: vec![action.score], ..Outcome::default() };
        for p in parts {
            out.value += p.value;
            out.leaves += p.leaves;
            out.depth = out.depth.max(p.depth + 1);
            out.absorb_widths(&p.widths, 1);
        }
        Ok(out)
    }

    /// Cut non-Clifford spiders one at a time until Clifford evaluation
    /// applies.
    fn expand_exhaustively(&self, d: ZxDiagram) -> Result<Outcome> {
        let d = full_reduce(&d);
        if d.nc_count() <= 1 {
            return Ok(Outcome::leaf(evaluate_clifford(&d)?));
        }
        let v = d.vertices().find(|&v| d.is_non_clifford(v)).unwrap();
        let action = CutAction::vertex_cut(vec![v]);
        let parts = par_map(self.cfg.jobs, 2, |i| self.expand_exhaustively(action.term(&d, i)))?;
        let mut out = Outcome { value: Scalar::zero(), ..Outcome::default() };
        for p in parts {
            out.value += p.value;
            out.leaves += p.leaves;
            out.depth = out.depth.max(p.depth + 1);
        }
        Ok(out)
    }
}

/// Strong simulation: the value of a closed diagram.
pub fn simulate(d: &ZxDiagram, cfg: &SimConfig) -> Result<SimResult> {
    let start = Instant::now();
    if !d.is_closed() {
        return Err(Error::OpenDiagram);
    }
    d.check_wellformed()?;
    let mut d = to_graph_like(d);
    if cfg.simplify {
        d = full_reduce(&d);
    }
    let n_spiders = d.num_vertices();
    let nc = d.nc_count();
    let (g, present) = id_graph(&d);
    let mut ctx = Ctx { cfg, rd: None, td: None };
    if n_spiders > 0 && !cfg.recompute_per_level {
        match cfg.mode {
            Mode::RankWidth => {
                let objective = if cfg.mixed { Objective::Mixed } else { Objective::CutRank };
                let acfg = AnnealConfig::with_steps(cfg.anneal_steps, cfg.seed);
                ctx.rd = Some(anneal_rank_decomposition_within(&g, &present, objective, &acfg));
            }
            Mode::TreeWidth => ctx.td = Some(tree_decomposition_heuristic(&g, &present)),
        }
    }
    let out = with_pool(cfg.jobs, || ctx.eval(d))?;
    let width_used = out.widths.iter().copied().max().unwrap_or(0);
    let base = if cfg.clifford_base { nc } else { n_spiders } as f64;
    let exponent = match cfg.mode {
        Mode::RankWidth => gamma() * width_used as f64,
        Mode::TreeWidth => width_used as f64,
    };
    let leaf_bound = if base <= 1.0 { 1.0 } else { base.powf(exponent) };
    let stats = SimStats {
        n_spiders,
        nc,
        leaves: out.leaves,
        max_depth: out.depth,
        widths_per_level: out.widths,
        width_used,
        leaf_bound,
        within_bound: out.leaves as f64 <= leaf_bound,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    Ok(SimResult { value: out.value, amplitude: out.value.to_complex(), stats })
}
