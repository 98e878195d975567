//! Brute-force tensor contraction of small closed diagrams.
//!
//! Deliberately shares nothing with the rewrite engine: it does not use
//! graph-like form, `Scalar` arithmetic beyond the final factor, or any
//! of the rules. Every spider gets one bit. Z spiders are indexed in the
//! computational basis and X spiders in the Hadamard basis, so every
//! spider is the diagonal tensor `(1, e^{iα})` on its bit and each edge
//! becomes either a delta or a normalized Hadamard matrix between the
//! two bits.

use num_complex::Complex64;

use crate::diagram::{EType, VType, ZxDiagram};
use crate::error::{Error, Result};

#[derive(Copy, Clone, Debug)]
pub struct OracleConfig {
    pub max_vertices: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { max_vertices: 16 }
    }
}

/// Exact value of a closed diagram, including its scalar.
pub fn contract_oracle(d: &ZxDiagram) -> Result<Complex64> {
    contract_oracle_with(d, OracleConfig::default())
}

pub fn contract_oracle_with(d: &ZxDiagram, cfg: OracleConfig) -> Result<Complex64> {
    d.check_wellformed()?;
    if !d.is_closed() {
        return Err(Error::OpenDiagram);
    }
    let n = d.num_vertices();
    if n > cfg.max_vertices {
        return Err(Error::SizeExceeded { found: n, bound: cfg.max_vertices });
    }
    let ids: Vec<usize> = d.vertices().collect();
    let mut index = vec![usize::MAX; d.capacity()];
    for (i, &v) in ids.iter().enumerate() {
        index[v] = i;
    }
    let units: Vec<Complex64> = ids.iter().map(|&v| Complex64::from_polar(1.0, d.phase(v).radians())).collect();

    // delta edges force equal bits; Hadamard edges give a sign (−1)^{xy}
    let mut deltas = Vec::new();
    let mut signs = Vec::new();
    for (u, v, t) in d.edges() {
        let same = d.vertex_type(u) == d.vertex_type(v);
        let hadamard = (t == EType::Hadamard) == same;
        let pair = (index[u], index[v]);
        if hadamard {
            signs.push(pair);
        } else {
            deltas.push(pair);
        }
    }

    let mut total = Complex64::new(0.0, 0.0);
    for x in 0u64..(1u64 << n) {
        let bit = |i: usize| (x >> i) & 1 == 1;
        if deltas.iter().any(|&(a, b)| bit(a) != bit(b)) {
            continue;
        }
        let parity = signs.iter().filter(|&&(a, b)| bit(a) && bit(b)).count() % 2;
        let mut term = Complex64::new(if parity == 0 { 1.0 } else { -1.0 }, 0.0);
        for (i, u) in units.iter().enumerate() {
            if bit(i) {
                term *= u;
            }
        }
        total += term;
    }
    let norm = 2f64.powf(-(signs.len() as f64) / 2.0);
    debug_assert!(ids.iter().all(|&v| d.vertex_type(v) != VType::Boundary));
    Ok(total * norm * d.scalar().to_complex())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Phase;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn lone_spiders() {
        let mut d = ZxDiagram::new();
        d.add_vertex(VType::Z);
        assert!(close(contract_oracle(&d).unwrap(), Complex64::new(2.0, 0.0)));
        let mut d = ZxDiagram::new();
        d.add_vertex_with_phase(VType::X, Phase::pi());
        assert!(close(contract_oracle(&d).unwrap(), Complex64::new(0.0, 0.0)));
    }

    // independent 2×2 matrix product ⟨s_α| H |s_β⟩ with s_α = (1, e^{iα})
    fn h_pair(a: f64, b: f64) -> Complex64 {
        let sa = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, a)];
        let sb = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, b)];
        let h = [[1.0, 1.0], [1.0, -1.0]];
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += sa[i] * h[i][j] * sb[j];
            }
        }
        acc * FRAC_1_SQRT_2
    }

    #[test]
    fn h_edge_pair_matches_matrix_product() {
        for (a, b) in [(1, 2), (1, 4), (3, 4), (0, 1)] {
            let mut d = ZxDiagram::new();
            let u = d.add_vertex_with_phase(VType::Z, Phase::rational(a, 4));
            let v = d.add_vertex_with_phase(VType::Z, Phase::rational(b, 4));
            d.add_edge(u, v, EType::Hadamard);
            let want = h_pair(Phase::rational(a, 4).radians(), Phase::rational(b, 4).radians());
            assert!(close(contract_oracle(&d).unwrap(), want));
        }
        // (π/2, π/2): unnormalized 2 + 2i, normalized √2(1 + i)
        let want = h_pair(std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2);
        assert!(close(want, Complex64::new(1.0, 1.0) * 2f64.sqrt()));
    }

    #[test]
    fn colour_change_is_exact() {
        // X(α) -P- Z(β) equals Z(α) -H- Z(β)
        let mut a = ZxDiagram::new();
        let u = a.add_vertex_with_phase(VType::X, Phase::rational(1, 3));
        let v = a.add_vertex_with_phase(VType::Z, Phase::rational(5, 7));
        a.add_edge(u, v, EType::Plain);
        let mut b = ZxDiagram::new();
        let u = b.add_vertex_with_phase(VType::Z, Phase::rational(1, 3));
        let v = b.add_vertex_with_phase(VType::Z, Phase::rational(5, 7));
        b.add_edge(u, v, EType::Hadamard);
        assert!(close(contract_oracle(&a).unwrap(), contract_oracle(&b).unwrap()));
    }

    #[test]
    fn bound_and_open_diagrams_rejected() {
        let mut d = ZxDiagram::new();
        for _ in 0..17 {
            d.add_vertex(VType::Z);
        }
        assert!(matches!(contract_oracle(&d), Err(Error::SizeExceeded { found: 17, bound: 16 })));
        assert!(contract_oracle_with(&d, OracleConfig { max_vertices: 17 }).is_ok());

        let mut d = ZxDiagram::new();
        let b = d.add_vertex(VType::Boundary);
        let z = d.add_vertex(VType::Z);
        d.add_edge(b, z, EType::Plain);
        d.set_inputs(vec![b]);
        assert!(matches!(contract_oracle(&d), Err(Error::OpenDiagram)));
    }
}
