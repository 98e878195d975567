//! Benchmark families, circuits and their translation to closed diagrams.
//!
//! Every generator seeds `ChaCha8Rng::seed_from_u64(seed)` and then selects
//! its own stream (`set_stream`), so the three families never share
//! random numbers for equal seeds.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use web_time::Instant;

use crate::decomp::{anneal_rank_decomposition_within, AnnealConfig, Objective};
use crate::diagram::{EType, VType, ZxDiagram, V};
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::plan::{build_cut_tree, PlannerConfig};
use crate::rules::full_reduce;
use crate::scalar::Scalar;
use crate::sim::id_graph;

pub const STREAM_ER: u64 = 1;
pub const STREAM_CLIFFORD_RZ: u64 = 2;
pub const STREAM_PAULI: u64 = 3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
    Rz(usize, Phase),
    /// `exp(−iθ/2 · P)` for the Pauli string `P` on the listed qubits.
    Gadget(Vec<(usize, Pauli)>, Phase),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub qubits: usize,
    pub gates: Vec<Gate>,
}

fn format_phase(p: Phase) -> String {
    match p {
        Phase::Exact { num: 0, .. } => "0".into(),
        Phase::Exact { num, den } => {
            let n = if num == 1 { String::new() } else { num.to_string() };
            if den == 1 {
                format!("{n}pi")
            } else {
                format!("{n}pi/{den}")
            }
        }
        Phase::Real(r) => format!("{r:?}"),
    }
}

/// Radians as a float, or an exact multiple of π written `pi`, `3pi/4`, `-pi/2`.
pub fn parse_phase(s: &str) -> Option<Phase> {
    if let Some(i) = s.find("pi") {
        let num = match &s[..i] {
            "" | "+" => 1,
            "-" => -1,
            n => n.parse().ok()?,
        };
        let den = match &s[i + 2..] {
            "" => 1,
            rest => rest.strip_prefix('/')?.parse().ok().filter(|&d: &i64| d != 0)?,
        };
        return Some(Phase::rational(num, den));
    }
    let r: f64 = s.parse().ok().filter(|r: &f64| r.is_finite())?;
    Some(if r == 0.0 { Phase::zero() } else { Phase::real(r) })
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QUBITS {}", self.qubits)?;
        for g in &self.gates {
            match g {
                Gate::H(q) => writeln!(f, "H {q}")?,
                Gate::S(q) => writeln!(f, "S {q}")?,
                Gate::Cnot(c, t) => writeln!(f, "CNOT {c} {t}")?,
                Gate::Rz(q, p) => writeln!(f, "RZ {q} {}", format_phase(*p))?,
                Gate::Gadget(terms, p) => {
                    let letters: String = terms.iter().map(|(_, l)| format!("{l:?}")).collect();
                    write!(f, "GADGET {letters} {}", format_phase(*p))?;
                    for (q, _) in terms {
                        write!(f, " {q}")?;
                    }
                    writeln!(f)?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for Circuit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Circuit> {
        let mut qubits = None;
        let mut gates = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            let text = raw.split('#').next().unwrap().trim();
            if text.is_empty() {
                continue;
            }
            let err = |msg: &str| Error::Parse { line, msg: msg.to_string() };
            let tok: Vec<&str> = text.split_whitespace().collect();
            let qubit = |t: &str| -> Result<usize> {
                let q: usize = t.parse().map_err(|_| err(&format!("bad qubit index `{t}`")))?;
                match qubits {
                    Some(n) if q < n => Ok(q),
                    Some(n) => Err(err(&format!("qubit {q} out of range for {n} qubits"))),
                    None => Err(err("gate before QUBITS header")),
                }
            };
            let angle = |t: &str| parse_phase(t).ok_or_else(|| err(&format!("bad angle `{t}`")));
            let arity = |k: usize| if tok.len() == k { Ok(()) } else { Err(err(&format!("{} expects {} arguments", tok[0], k - 1))) };
            match tok[0].to_ascii_uppercase().as_str() {
                "QUBITS" => {
                    arity(2)?;
                    if qubits.is_some() {
                        return Err(err("duplicate QUBITS header"));
                    }
                    qubits = Some(tok[1].parse().map_err(|_| err("bad qubit count"))?);
                }
                "H" => {
                    arity(2)?;
                    gates.push(Gate::H(qubit(tok[1])?));
                }
                "S" => {
                    arity(2)?;
                    gates.push(Gate::S(qubit(tok[1])?));
                }
                "CNOT" => {
                    arity(3)?;
                    let (c, t) = (qubit(tok[1])?, qubit(tok[2])?);
                    if c == t {
                        return Err(err("CNOT control equals target"));
                    }
                    gates.push(Gate::Cnot(c, t));
                }
                "RZ" => {
                    arity(3)?;
                    gates.push(Gate::Rz(qubit(tok[1])?, angle(tok[2])?));
                }
                "GADGET" => {
                    if tok.len() < 4 {
                        return Err(err("GADGET expects a Pauli string, an angle and qubits"));
                    }
                    let letters: Vec<Pauli> = tok[1]
                        .chars()
                        .map(|c| match c.to_ascii_uppercase() {
                            'X' => Ok(Pauli::X),
                            'Y' => Ok(Pauli::Y),
                            'Z' => Ok(Pauli::Z),
                            _ => Err(err(&format!("bad Pauli letter `{c}`"))),
                        })
                        .collect::<Result<_>>()?;
                    let qs: Vec<usize> = tok[3..].iter().map(|t| qubit(t)).collect::<Result<_>>()?;
                    if qs.len() != letters.len() {
                        return Err(err("Pauli string length differs from qubit count"));
                    }
                    let mut sorted = qs.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    if sorted.len() != qs.len() {
                        return Err(err("repeated qubit in gadget"));
                    }
                    gates.push(Gate::Gadget(qs.into_iter().zip(letters).collect(), angle(tok[2])?));
                }
                other => return Err(err(&format!("unknown gate `{other}`"))),
            }
        }
        let qubits = qubits.ok_or(Error::Parse { line: 0, msg: "missing QUBITS header".into() })?;
        Ok(Circuit { qubits, gates })
    }
}

impl Circuit {
    /// The gadgets expanded into H, S, CNOT and RZ.
    pub fn expanded(&self) -> Vec<Gate> {
        let mut out = Vec::new();
        for g in &self.gates {
            let Gate::Gadget(terms, theta) = g else {
                out.push(g.clone());
                continue;
            };
            for &(q, l) in terms {
                match l {
                    Pauli::X => out.push(Gate::H(q)),
                    // S† then H maps Y to Z
                    Pauli::Y => out.extend([Gate::S(q), Gate::S(q), Gate::S(q), Gate::H(q)]),
                    Pauli::Z => {}
                }
            }
            let qs: Vec<usize> = terms.iter().map(|&(q, _)| q).collect();
            for w in qs.windows(2) {
                out.push(Gate::Cnot(w[0], w[1]));
            }
            out.push(Gate::Rz(*qs.last().unwrap(), *theta));
            for w in qs.windows(2).rev() {
                out.push(Gate::Cnot(w[0], w[1]));
            }
            for &(q, l) in terms {
                match l {
                    Pauli::X => out.push(Gate::H(q)),
                    Pauli::Y => out.extend([Gate::H(q), Gate::S(q)]),
                    Pauli::Z => {}
                }
            }
        }
        out
    }

    pub fn is_clifford(&self) -> bool {
        self.gates.iter().all(|g| match g {
            Gate::Rz(_, p) | Gate::Gadget(_, p) => p.is_clifford(),
            _ => true,
        })
    }
}

/// `⟨0ⁿ| C |0ⁿ⟩` as a closed diagram.
pub fn to_diagram(c: &Circuit) -> ZxDiagram {
    let mut d = ZxDiagram::new();
    let mut last: Vec<V> = Vec::with_capacity(c.qubits);
    let mut hadamard = vec![false; c.qubits];
    for _ in 0..c.qubits {
        last.push(d.add_vertex(VType::X));
    }
    let mut s = Scalar::one();
    // each |0⟩ and ⟨0| is 2^{-1/2} times a one-legged X spider
    s.mul_sqrt2_pow(-2 * c.qubits as i32);
    fn attach(d: &mut ZxDiagram, last: &mut [V], hadamard: &mut [bool], q: usize, ty: VType, p: Phase) -> V {
        let v = d.add_vertex_with_phase(ty, p);
        let et = if hadamard[q] { EType::Hadamard } else { EType::Plain };
        d.add_edge(last[q], v, et);
        hadamard[q] = false;
        last[q] = v;
        v
    }
    for g in c.expanded() {
        match g {
            Gate::H(q) => hadamard[q] ^= true,
            Gate::S(q) => {
                attach(&mut d, &mut last, &mut hadamard, q, VType::Z, Phase::rational(1, 2));
            }
            Gate::Rz(q, theta) => {
                attach(&mut d, &mut last, &mut hadamard, q, VType::Z, theta);
                s.mul_phase(-half(theta));
            }
            Gate::Cnot(ctl, tgt) => {
                let a = attach(&mut d, &mut last, &mut hadamard, ctl, VType::Z, Phase::zero());
                let b = attach(&mut d, &mut last, &mut hadamard, tgt, VType::X, Phase::zero());
                d.add_edge(a, b, EType::Plain);
                s.mul_sqrt2_pow(1);
            }
            Gate::Gadget(..) => unreachable!("expanded away"),
        }
    }
    for q in 0..c.qubits {
        attach(&mut d, &mut last, &mut hadamard, q, VType::X, Phase::zero());
    }
    *d.scalar_mut() = s;
    d
}

fn half(p: Phase) -> Phase {
    match p {
        Phase::Exact { num, den } => Phase::rational(num, 2 * den),
        Phase::Real(r) => Phase::real(r / 2.0),
    }
}

/// Dense statevector evaluation of `⟨0ⁿ| C |0ⁿ⟩`, applying gadgets directly
/// as `cos(θ/2)·I − i·sin(θ/2)·P`.
pub fn statevector_amplitude(c: &Circuit) -> Result<Complex64> {
    if c.qubits > 24 {
        return Err(Error::SizeExceeded { found: c.qubits, bound: 24 });
    }
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << c.qubits];
    psi[0] = Complex64::new(1.0, 0.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::i();
    for g in &c.gates {
        match g {
            Gate::H(q) => {
                let m = 1 << q;
                for x in 0..psi.len() {
                    if x & m == 0 {
                        let (a, b) = (psi[x], psi[x | m]);
                        psi[x] = (a + b) * r;
                        psi[x | m] = (a - b) * r;
                    }
                }
            }
            Gate::S(q) => {
                for (x, amp) in psi.iter_mut().enumerate() {
                    if x >> q & 1 == 1 {
                        *amp *= i;
                    }
                }
            }
            Gate::Cnot(ctl, tgt) => {
                let m = 1 << tgt;
                for x in 0..psi.len() {
                    if x >> ctl & 1 == 1 && x & m == 0 {
                        psi.swap(x, x | m);
                    }
                }
            }
            Gate::Rz(q, theta) => {
                let t = theta.radians() / 2.0;
                let (lo, hi) = (Complex64::from_polar(1.0, -t), Complex64::from_polar(1.0, t));
                for (x, amp) in psi.iter_mut().enumerate() {
                    *amp *= if x >> q & 1 == 1 { hi } else { lo };
                }
            }
            Gate::Gadget(terms, theta) => {
                let t = theta.radians() / 2.0;
                let mut flip = 0usize;
                for &(q, l) in terms {
                    if l != Pauli::Z {
                        flip |= 1 << q;
                    }
                }
                let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
                for (x, &amp) in psi.iter().enumerate() {
                    // P|x⟩ = coeff·|x ⊕ flip⟩
                    let mut coeff = Complex64::new(1.0, 0.0);
                    for &(q, l) in terms {
                        let bit = x >> q & 1 == 1;
                        match l {
                            Pauli::X => {}
                            Pauli::Y => coeff *= if bit { -i } else { i },
                            Pauli::Z => {
                                if bit {
                                    coeff = -coeff;
                                }
                            }
                        }
                    }
                    out[x] += amp * t.cos();
                    out[x ^ flip] += -i * t.sin() * coeff * amp;
                }
                psi = out;
            }
        }
    }
    Ok(psi[0])
}

/// Erdős–Rényi graph as a closed graph-like diagram with generic phases.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> ZxDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_ER);
    let mut d = ZxDiagram::new();
    for _ in 0..n {
        let alpha = rng.gen::<f64>() * std::f64::consts::TAU;
        d.add_vertex_with_phase(VType::Z, Phase::real(alpha));
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                d.add_edge(u, v, EType::Hadamard);
            }
        }
    }
    d
}

/// Random Clifford+RZ circuit: each gate is an RZ with probability
/// `p_phase` and otherwise H, S or CNOT with equal probability.
pub fn gen_clifford_rz(qubits: usize, gates: usize, p_phase: f64, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_CLIFFORD_RZ);
    let mut out = Vec::with_capacity(gates);
    for _ in 0..gates {
        let q = rng.gen_range(0..qubits);
        if rng.gen::<f64>() < p_phase {
            out.push(Gate::Rz(q, Phase::real(rng.gen::<f64>() * std::f64::consts::TAU)));
            continue;
        }
        let kinds = if qubits > 1 { 3 } else { 2 };
        match rng.gen_range(0..kinds) {
            0 => out.push(Gate::H(q)),
            1 => out.push(Gate::S(q)),
            _ => {
                let mut t = rng.gen_range(0..qubits - 1);
                if t >= q {
                    t += 1;
                }
                out.push(Gate::Cnot(q, t));
            }
        }
    }
    Circuit { qubits, gates: out }
}

/// Random Pauli gadgets: support size uniform on `1..=⌊qubits/2⌋`, then a
/// uniform qubit subset, uniform letters and a uniform angle.
pub fn gen_pauli_gadgets(qubits: usize, count: usize, seed: u64) -> Circuit {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_PAULI);
    let max_support = (qubits / 2).max(1);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.gen_range(1..=max_support);
        let mut qs = sample(&mut rng, qubits, k).into_vec();
        qs.sort_unstable();
        let terms = qs
            .into_iter()
            .map(|q| {
                let l = match rng.gen_range(0..3) {
                    0 => Pauli::X,
                    1 => Pauli::Y,
                    _ => Pauli::Z,
                };
                (q, l)
            })
            .collect();
        out.push(Gate::Gadget(terms, Phase::real(rng.gen::<f64>() * std::f64::consts::TAU)));
    }
    Circuit { qubits, gates: out }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Instance {
    Er { n: usize, p: f64 },
    CliffordRz { qubits: usize, gates: usize, p_phase: f64 },
    Pauli { qubits: usize, gadgets: usize },
}

impl Instance {
    pub fn family(&self) -> &'static str {
        match self {
            Instance::Er { .. } => "er",
            Instance::CliffordRz { .. } => "cliffordrz",
            Instance::Pauli { .. } => "pauli",
        }
    }

    pub fn circuit(&self, seed: u64) -> Option<Circuit> {
        match *self {
            Instance::Er { .. } => None,
            Instance::CliffordRz { qubits, gates, p_phase } => Some(gen_clifford_rz(qubits, gates, p_phase, seed)),
            Instance::Pauli { qubits, gadgets } => Some(gen_pauli_gadgets(qubits, gadgets, seed)),
        }
    }

    pub fn diagram(&self, seed: u64) -> ZxDiagram {
        match *self {
            Instance::Er { n, p } => gen_erdos_renyi(n, p, seed),
            _ => to_diagram(&self.circuit(seed).unwrap()),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub anneal_steps: usize,
    pub planner: PlannerConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { anneal_steps: AnnealConfig::default().steps, planner: PlannerConfig::default() }
    }
}

/// One CSV row. Columns that do not apply to a family are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: String,
    pub n_qubits: Option<usize>,
    pub n_gates: Option<usize>,
    /// Spiders after simplification.
    pub n_vertices: usize,
    pub nc: usize,
    pub p: Option<f64>,
    pub rank_width: usize,
    pub mixed_rank_width: usize,
    /// Empty when `nc = 0`.
    pub alpha: Option<f64>,
    pub terms_log2: f64,
    pub seed: u64,
    pub wall_ms: f64,
}

pub const CSV_COLUMNS: [&str; 12] = [
    "family", "n_qubits", "n_gates", "n_vertices", "nc", "p", "rank_width", "mixed_rank_width", "alpha", "terms_log2", "seed", "wall_ms",
];

/// Simplify, anneal rank and mixed rank decompositions, plan, and report.
pub fn run_instance(inst: &Instance, seed: u64, cfg: &BenchConfig) -> BenchRow {
    let start = Instant::now();
    let d = full_reduce(&inst.diagram(seed));
    let (g, present) = id_graph(&d);
    let acfg = AnnealConfig::with_steps(cfg.anneal_steps, seed);
    let (rank_width, mixed_rank_width, ct) = if d.num_vertices() == 0 {
        (0, 0, None)
    } else {
        let rd = anneal_rank_decomposition_within(&g, &present, Objective::CutRank, &acfg);
        let md = anneal_rank_decomposition_within(&g, &present, Objective::Mixed, &acfg);
        let planner = PlannerConfig { seed, ..cfg.planner };
        (rd.width(&g), md.mixed_width(&g), Some(build_cut_tree(&d, &md, &planner)))
    };
    let nc = d.nc_count();
    let terms_log2 = ct.as_ref().map_or(0.0, |t| t.terms_log2());
    let (n_qubits, n_gates, p) = match *inst {
        Instance::Er { p, .. } => (None, None, Some(p)),
        Instance::CliffordRz { qubits, gates, p_phase } => (Some(qubits), Some(gates), Some(p_phase)),
        Instance::Pauli { qubits, gadgets } => (Some(qubits), Some(gadgets), None),
    };
    BenchRow {
        family: inst.family().to_string(),
        n_qubits,
        n_gates,
        n_vertices: d.num_vertices(),
        nc,
        p,
        rank_width,
        mixed_rank_width,
        alpha: ct.filter(|_| nc > 0).map(|t| t.alpha),
        terms_log2,
        seed,
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}
