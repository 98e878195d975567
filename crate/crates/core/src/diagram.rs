//! The ZX-diagram data model.
//!
//! Vertex ids are stable: removing a vertex leaves a hole rather than
//! renumbering, so decompositions and plans computed for a diagram keep
//! referring to the same spiders as it shrinks.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::phase::Phase;
use crate::scalar::Scalar;

pub type V = usize;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VType {
    Z,
    X,
    Boundary,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EType {
    #[serde(rename = "P")]
    Plain,
    #[serde(rename = "H")]
    Hadamard,
}

impl EType {
    pub fn flip(self) -> EType {
        match self {
            EType::Plain => EType::Hadamard,
            EType::Hadamard => EType::Plain,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VData {
    pub ty: VType,
    pub phase: Phase,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZxDiagram {
    vdata: Vec<Option<VData>>,
    adj: Vec<BTreeMap<V, EType>>,
    inputs: Vec<V>,
    outputs: Vec<V>,
    scalar: Scalar,
    nv: usize,
    ne: usize,
}

impl ZxDiagram {
    pub fn new() -> ZxDiagram {
        ZxDiagram::default()
    }

    pub fn add_vertex(&mut self, ty: VType) -> V {
        self.add_vertex_with_phase(ty, Phase::zero())
    }

    pub fn add_vertex_with_phase(&mut self, ty: VType, phase: Phase) -> V {
        let v = self.vdata.len();
        self.vdata.push(Some(VData { ty, phase }));
        self.adj.push(BTreeMap::new());
        self.nv += 1;
        v
    }

    /// Insert a vertex under a caller-chosen id (used when loading files).
    pub fn add_vertex_at(&mut self, v: V, ty: VType, phase: Phase) -> Result<()> {
        if v >= self.vdata.len() {
            self.vdata.resize(v + 1, None);
            self.adj.resize(v + 1, BTreeMap::new());
        }
        if self.vdata[v].is_some() {
            return Err(Error::Malformed(format!("duplicate vertex id {v}")));
        }
        self.vdata[v] = Some(VData { ty, phase });
        self.nv += 1;
        Ok(())
    }

    pub fn remove_vertex(&mut self, v: V) {
        let nbrs: Vec<V> = self.adj[v].keys().copied().collect();
        for n in nbrs {
            self.adj[n].remove(&v);
            self.ne -= 1;
        }
        self.adj[v].clear();
        if self.vdata[v].take().is_some() {
            self.nv -= 1;
        }
        self.inputs.retain(|&x| x != v);
        self.outputs.retain(|&x| x != v);
    }

    pub fn contains(&self, v: V) -> bool {
        self.vdata.get(v).is_some_and(Option::is_some)
    }

    pub fn vertices(&self) -> impl Iterator<Item = V> + '_ {
        self.vdata.iter().enumerate().filter_map(|(i, d)| d.as_ref().map(|_| i))
    }

    pub fn num_vertices(&self) -> usize {
        self.nv
    }

    pub fn num_edges(&self) -> usize {
        self.ne
    }

    /// One past the largest vertex id ever allocated.
    pub fn capacity(&self) -> usize {
        self.vdata.len()
    }

    fn data(&self, v: V) -> &VData {
        self.vdata[v].as_ref().unwrap_or_else(|| panic!("vertex {v} does not exist"))
    }

    fn data_mut(&mut self, v: V) -> &mut VData {
        self.vdata[v].as_mut().unwrap_or_else(|| panic!("vertex {v} does not exist"))
    }

    pub fn vertex_type(&self, v: V) -> VType {
        self.data(v).ty
    }

    pub fn set_vertex_type(&mut self, v: V, ty: VType) {
        self.data_mut(v).ty = ty;
    }

    pub fn phase(&self, v: V) -> Phase {
        self.data(v).phase
    }

    pub fn set_phase(&mut self, v: V, p: Phase) {
        self.data_mut(v).phase = p;
    }

    pub fn add_to_phase(&mut self, v: V, p: Phase) {
        let d = self.data_mut(v);
        d.phase = d.phase + p;
    }

    pub fn edge_type(&self, u: V, v: V) -> Option<EType> {
        self.adj.get(u).and_then(|m| m.get(&v)).copied()
    }

    pub fn connected(&self, u: V, v: V) -> bool {
        self.edge_type(u, v).is_some()
    }

    pub fn neighbors(&self, v: V) -> impl Iterator<Item = V> + '_ {
        self.adj[v].keys().copied()
    }

    pub fn incident_edges(&self, v: V) -> impl Iterator<Item = (V, EType)> + '_ {
        self.adj[v].iter().map(|(&n, &t)| (n, t))
    }

    pub fn degree(&self, v: V) -> usize {
        self.adj[v].len()
    }

    /// Insert or overwrite a single edge without any normalization.
    pub fn set_edge(&mut self, u: V, v: V, et: EType) {
        assert!(u != v, "set_edge does not create self-loops");
        if self.adj[u].insert(v, et).is_none() {
            self.ne += 1;
        }
        self.adj[v].insert(u, et);
    }

    pub fn remove_edge(&mut self, u: V, v: V) {
        if self.adj[u].remove(&v).is_some() {
            self.adj[v].remove(&u);
            self.ne -= 1;
        }
    }

    /// Add an edge, resolving self-loops and parallel edges between
    /// spiders so the diagram stays simple:
    ///
    /// * plain self-loop: dropped; Hadamard self-loop: `+π`, scalar `1/√2`
    /// * two Hadamard-like edges (Hopf): both removed, scalar `1/2`
    /// * two plain-like edges: one kept (the spiders fuse either way)
    /// * one of each: keep the plain-like edge, `+π`, scalar `1/√2`
    ///
    /// "Hadamard-like" means an H-edge between spiders of the same colour
    /// or a plain edge between spiders of different colours.
    ///
    /// Panics if a boundary vertex would get a self-loop or a second edge.
    pub fn add_edge(&mut self, u: V, v: V, et: EType) {
        if u == v {
            assert!(self.vertex_type(u) != VType::Boundary, "self-loop on boundary {u}");
            if et == EType::Hadamard {
                self.add_to_phase(u, Phase::pi());
                self.scalar.mul_sqrt2_pow(-1);
            }
            return;
        }
        let Some(old) = self.edge_type(u, v) else {
            self.set_edge(u, v, et);
            return;
        };
        let (tu, tv) = (self.vertex_type(u), self.vertex_type(v));
        assert!(
            tu != VType::Boundary && tv != VType::Boundary,
            "parallel edge on boundary between {u} and {v}"
        );
        let same = tu == tv;
        let eff = |t: EType| if same { t } else { t.flip() };
        let real = |t: EType| if same { t } else { t.flip() };
        match (eff(old), eff(et)) {
            (EType::Hadamard, EType::Hadamard) => {
                self.remove_edge(u, v);
                self.scalar.mul_sqrt2_pow(-2);
            }
            (EType::Plain, EType::Plain) => {}
            _ => {
                self.set_edge(u, v, real(EType::Plain));
                self.add_to_phase(u, Phase::pi());
                self.scalar.mul_sqrt2_pow(-1);
            }
        }
    }

    /// All edges as `(u, v, type)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(V, V, EType)> {
        let mut out = Vec::with_capacity(self.ne);
        for u in self.vertices() {
            for (&v, &t) in self.adj[u].range(u + 1..) {
                out.push((u, v, t));
            }
        }
        out
    }

    pub fn inputs(&self) -> &[V] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[V] {
        &self.outputs
    }

    pub fn set_inputs(&mut self, inputs: Vec<V>) {
        self.inputs = inputs;
    }

    pub fn set_outputs(&mut self, outputs: Vec<V>) {
        self.outputs = outputs;
    }

    pub fn scalar(&self) -> &Scalar {
        &self.scalar
    }

    pub fn scalar_mut(&mut self) -> &mut Scalar {
        &mut self.scalar
    }

    pub fn set_scalar(&mut self, s: Scalar) {
        self.scalar = s;
    }

    pub fn is_boundary(&self, v: V) -> bool {
        self.vertex_type(v) == VType::Boundary
    }

    /// A spider that is not a boundary and has no boundary neighbours.
    pub fn is_interior(&self, v: V) -> bool {
        self.contains(v) && !self.is_boundary(v) && self.neighbors(v).all(|n| !self.is_boundary(n))
    }

    pub fn is_closed(&self) -> bool {
        self.inputs.is_empty()
            && self.outputs.is_empty()
            && self.vertices().all(|v| !self.is_boundary(v))
    }

    pub fn is_graph_like(&self) -> bool {
        self.vertices().all(|v| self.vertex_type(v) != VType::X)
            && self.edges().into_iter().all(|(u, v, t)| {
                t == EType::Hadamard || self.is_boundary(u) || self.is_boundary(v)
            })
    }

    /// Checks the structural invariants: boundaries have degree 1 and
    /// phase 0, inputs/outputs are boundary vertices, adjacency is symmetric.
    pub fn check_wellformed(&self) -> Result<()> {
        for v in self.vertices() {
            if self.is_boundary(v) {
                if self.degree(v) != 1 {
                    return Err(Error::Malformed(format!(
                        "boundary {v} has degree {}",
                        self.degree(v)
                    )));
                }
                if !self.phase(v).is_zero() {
                    return Err(Error::Malformed(format!("boundary {v} has a phase")));
                }
            }
            for (n, t) in self.incident_edges(v) {
                if n == v {
                    return Err(Error::Malformed(format!("self-loop at {v}")));
                }
                if !self.contains(n) || self.edge_type(n, v) != Some(t) {
                    return Err(Error::Malformed(format!("asymmetric edge {v}-{n}")));
                }
            }
        }
        for &b in self.inputs.iter().chain(&self.outputs) {
            if !self.contains(b) || !self.is_boundary(b) {
                return Err(Error::Malformed(format!("io vertex {b} is not a boundary")));
            }
        }
        Ok(())
    }

    /// Number of spiders whose phase is not an exact multiple of π/2.
    pub fn nc_count(&self) -> usize {
        self.vertices()
            .filter(|&v| !self.is_boundary(v) && !self.phase(v).is_clifford())
            .count()
    }

    pub fn is_non_clifford(&self, v: V) -> bool {
        !self.is_boundary(v) && !self.phase(v).is_clifford()
    }

    /// Sub-diagram induced on `vs`, keeping vertex ids, with unit scalar.
    pub fn induced(&self, vs: &[V]) -> ZxDiagram {
        let mut d = ZxDiagram {
            vdata: vec![None; self.vdata.len()],
            adj: vec![BTreeMap::new(); self.vdata.len()],
            ..ZxDiagram::default()
        };
        for &v in vs {
            d.vdata[v] = self.vdata[v].clone();
            d.nv += 1;
        }
        for &v in vs {
            for (&n, &t) in &self.adj[v] {
                if d.vdata[n].is_some() {
                    d.adj[v].insert(n, t);
                    if v < n {
                        d.ne += 1;
                    }
                }
            }
        }
        d
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<V>> {
        let mut seen = vec![false; self.vdata.len()];
        let mut out = Vec::new();
        for s in self.vertices() {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for n in self.neighbors(v) {
                    if !seen[n] {
                        seen[n] = true;
                        comp.push(n);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Underlying simple graph on dense indices, with the id of each index.
    pub fn to_graph(&self) -> (Graph, Vec<V>) {
        let ids: Vec<V> = self.vertices().collect();
        let mut index = vec![usize::MAX; self.vdata.len()];
        for (i, &v) in ids.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(ids.len());
        for (u, v, _) in self.edges() {
            g.add_edge(index[u], index[v]);
        }
        (g, ids)
    }

    /// Hash of the structure a cut plan depends on: vertex ids, vertex
    /// kinds, which spiders are non-Clifford, and the edge set.
    pub fn structure_hash(&self) -> String {
        let mut h = Sha256::new();
        for v in self.vertices() {
            let tag: u8 = match self.vertex_type(v) {
                VType::Z => 0,
                VType::X => 1,
                VType::Boundary => 2,
            };
            h.update((v as u64).to_le_bytes());
            h.update([tag, self.is_non_clifford(v) as u8]);
        }
        h.update(b"|");
        for (u, v, t) in self.edges() {
            h.update((u as u64).to_le_bytes());
            h.update((v as u64).to_le_bytes());
            h.update([t as u8]);
        }
        hex_string(&h.finalize())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DiagramFile::from(self)).expect("diagram serializes")
    }

    pub fn from_json(s: &str) -> Result<ZxDiagram> {
        let f: DiagramFile = serde_json::from_str(s)?;
        f.into_diagram()
    }
}

pub(crate) fn hex_string(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: V,
    kind: VType,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_num: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_den: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    phase_real: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct ScalarRecord {
    re: f64,
    im: f64,
    half_power: i32,
}

#[derive(Serialize, Deserialize)]
struct DiagramFile {
    vertices: Vec<VertexRecord>,
    edges: Vec<(V, V, EType)>,
    scalar: ScalarRecord,
    #[serde(default)]
    inputs: Vec<V>,
    #[serde(default)]
    outputs: Vec<V>,
}

impl From<&ZxDiagram> for DiagramFile {
    fn from(d: &ZxDiagram) -> Self {
        let vertices = d
            .vertices()
            .map(|v| {
                let (phase_num, phase_den, phase_real) = match d.phase(v) {
                    Phase::Exact { num, den } => (Some(num), Some(den), None),
                    Phase::Real(r) => (None, None, Some(r)),
                };
                VertexRecord { id: v, kind: d.vertex_type(v), phase_num, phase_den, phase_real }
            })
            .collect();
        let s = d.scalar();
        DiagramFile {
            vertices,
            edges: d.edges(),
            scalar: ScalarRecord { re: s.coeff().re, im: s.coeff().im, half_power: s.half_power() },
            inputs: d.inputs.clone(),
            outputs: d.outputs.clone(),
        }
    }
}

impl DiagramFile {
    fn into_diagram(self) -> Result<ZxDiagram> {
        let mut d = ZxDiagram::new();
        for r in &self.vertices {
            let phase = match (r.phase_num, r.phase_den, r.phase_real) {
                (Some(n), Some(den), None) if den != 0 => Phase::rational(n, den),
                (None, None, Some(x)) => Phase::real(x),
                (None, None, None) => Phase::zero(),
                _ => {
                    return Err(Error::Malformed(format!("vertex {} has an invalid phase", r.id)))
                }
            };
            d.add_vertex_at(r.id, r.kind, phase)?;
        }
        for &(u, v, t) in &self.edges {
            if !d.contains(u) || !d.contains(v) {
                return Err(Error::Malformed(format!("edge {u}-{v} references a missing vertex")));
            }
            let touches_boundary = d.is_boundary(u) || d.is_boundary(v);
            if touches_boundary && (u == v || d.connected(u, v)) {
                return Err(Error::Malformed(format!("boundary edge {u}-{v} repeated")));
            }
            d.add_edge(u, v, t);
        }
        d.scalar = Scalar::new(
            num_complex::Complex64::new(self.scalar.re, self.scalar.im),
            self.scalar.half_power,
        );
        d.inputs = self.inputs;
        d.outputs = self.outputs;
        d.check_wellformed()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_removes_double_h_edge() {
        let mut d = ZxDiagram::new();
        let a = d.add_vertex(VType::Z);
        let b = d.add_vertex(VType::Z);
        d.add_edge(a, b, EType::Hadamard);
        d.add_edge(a, b, EType::Hadamard);
        assert_eq!(d.num_edges(), 0);
        assert_eq!(d.scalar().to_complex().re, 0.5);
    }

    #[test]
    fn h_self_loop_adds_pi() {
        let mut d = ZxDiagram::new();
        let a = d.add_vertex(VType::X);
        d.add_edge(a, a, EType::Hadamard);
        assert_eq!(d.phase(a), Phase::pi());
        assert_eq!(d.num_edges(), 0);
        d.add_edge(a, a, EType::Plain);
        assert_eq!(d.phase(a), Phase::pi());
    }

    #[test]
    fn removing_vertices_keeps_ids() {
        let mut d = ZxDiagram::new();
        let a = d.add_vertex(VType::Z);
        let b = d.add_vertex(VType::Z);
        let c = d.add_vertex(VType::Z);
        d.add_edge(a, b, EType::Hadamard);
        d.add_edge(b, c, EType::Hadamard);
        d.remove_vertex(b);
        assert_eq!(d.vertices().collect::<Vec<_>>(), vec![a, c]);
        assert_eq!(d.num_edges(), 0);
        assert_eq!(d.components(), vec![vec![a], vec![c]]);
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let mut d = ZxDiagram::new();
        let i = d.add_vertex(VType::Boundary);
        let a = d.add_vertex_with_phase(VType::Z, Phase::rational(3, 4));
        let b = d.add_vertex_with_phase(VType::X, Phase::real(0.123456789));
        let o = d.add_vertex(VType::Boundary);
        d.add_edge(i, a, EType::Plain);
        d.add_edge(a, b, EType::Hadamard);
        d.add_edge(b, o, EType::Plain);
        d.set_inputs(vec![i]);
        d.set_outputs(vec![o]);
        d.scalar_mut().mul_sqrt2_pow(-3);
        let back = ZxDiagram::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_rejects_bad_boundary() {
        let s = r#"{"vertices":[{"id":0,"kind":"Boundary"},{"id":1,"kind":"Z"}],
                    "edges":[[0,1,"P"],[0,1,"H"]],
                    "scalar":{"re":1.0,"im":0.0,"half_power":0}}"#;
        assert!(matches!(ZxDiagram::from_json(s), Err(Error::Malformed(_))));
    }
}
