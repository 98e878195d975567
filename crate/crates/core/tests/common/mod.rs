#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zxwidth::bench::{Circuit, Gate};
use zxwidth::graph::Graph;
use zxwidth::{EType, Phase, VType, ZxDiagram};

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

pub fn random_phase(rng: &mut ChaCha8Rng) -> Phase {
    match rng.gen_range(0..3) {
        0 => Phase::rational(rng.gen_range(0..4), 2),
        1 => Phase::rational(rng.gen_range(0..8), 4),
        _ => Phase::real(rng.gen_range(0.0..std::f64::consts::TAU)),
    }
}

/// Closed diagram with `n` Z/X spiders, mixed phases, plain and H edges.
pub fn random_diagram(rng: &mut ChaCha8Rng, n: usize) -> ZxDiagram {
    let p = rng.gen_range(0.15..0.6);
    let mut d = ZxDiagram::new();
    for _ in 0..n {
        let ty = if rng.gen_bool(0.75) { VType::Z } else { VType::X };
        let ph = random_phase(rng);
        d.add_vertex_with_phase(ty, ph);
    }
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                let t = if rng.gen_bool(0.7) { EType::Hadamard } else { EType::Plain };
                d.add_edge(u, v, t);
            }
        }
    }
    d
}

/// The fixed corpus of small closed diagrams used for oracle comparisons.
pub fn oracle_corpus(count: usize) -> Vec<ZxDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..count).map(|_| {
        let n = rng.gen_range(1..=12);
        random_diagram(&mut rng, n)
    }).collect()
}

pub fn random_clifford_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let qubits = rng.gen_range(1..=10);
    let len = rng.gen_range(0..=200);
    let gates = (0..len)
        .map(|_| {
            let q = rng.gen_range(0..qubits);
            match rng.gen_range(0..4) {
                0 => Gate::H(q),
                1 => Gate::S(q),
                2 if qubits > 1 => {
                    let t = (q + rng.gen_range(1..qubits)) % qubits;
                    Gate::Cnot(q, t)
                }
                _ => Gate::Rz(q, Phase::rational(rng.gen_range(0..4), 2)),
            }
        })
        .collect();
    Circuit { qubits, gates }
}

pub fn diagram_of_graph(g: &Graph, phase: impl Fn(usize) -> Phase) -> ZxDiagram {
    let mut d = ZxDiagram::new();
    for v in 0..g.n() {
        d.add_vertex_with_phase(VType::Z, phase(v));
    }
    for (u, v) in g.edges() {
        d.add_edge(u, v, EType::Hadamard);
    }
    d
}

/// Distance-hereditary test: the graph reduces to one vertex by removing
/// pendant vertices and twins.
pub fn distance_hereditary(g: &Graph) -> bool {
    let mut alive: Vec<usize> = (0..g.n()).collect();
    let nbrs = |alive: &[usize], v: usize, skip: usize| -> Vec<usize> {
        alive.iter().copied().filter(|&w| w != v && w != skip && g.has_edge(v, w)).collect()
    };
    'shrink: while alive.len() > 1 {
        for i in 0..alive.len() {
            let v = alive[i];
            if nbrs(&alive, v, v).len() == 1 {
                alive.remove(i);
                continue 'shrink;
            }
            for &u in &alive {
                if u != v && nbrs(&alive, v, u) == nbrs(&alive, u, v) {
                    alive.remove(i);
                    continue 'shrink;
                }
            }
        }
        return false;
    }
    true
}
