//! Sum decompositions of graph-like diagrams: the vertex cut and the
//! complete bipartite sum.

use crate::diagram::{EType, ZxDiagram, V};
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::scalar::Scalar;

pub type Term = (Scalar, ZxDiagram);

/// Non-Clifford spider count.
pub fn nc_count(d: &ZxDiagram) -> usize {
    d.nc_count()
}

/// `val(d) = s₀·val(D₀) + s₁·val(D₁)`, where `D_p` is `d` without `v` and
/// with `pπ` added to every neighbour of `v`.
pub fn vertex_cut(d: &ZxDiagram, v: V) -> Result<[Term; 2]> {
    if !d.contains(v) {
        return Err(Error::Precondition { vertex: v, reason: "no such vertex".into() });
    }
    if !d.is_interior(v) {
        return Err(Error::Boundary(v));
    }
    let alpha = d.phase(v);
    let deg = d.degree(v) as i32;
    let nbrs: Vec<V> = d.neighbors(v).collect();
    let mut d0 = d.clone();
    d0.remove_vertex(v);
    let mut d1 = d0.clone();
    for &n in &nbrs {
        d1.add_to_phase(n, Phase::pi());
    }
    let mut s0 = Scalar::one();
    s0.mul_sqrt2_pow(-deg);
    let s1 = s0 * Scalar::from_phase(alpha);
    Ok([(s0, d0), (s1, d1)])
}

fn check_sets(d: &ZxDiagram, a: &[V], b: &[V]) -> Result<()> {
    let overlap: Vec<V> = a.iter().copied().filter(|x| b.contains(x)).collect();
    if !overlap.is_empty() {
        return Err(Error::Overlap(overlap));
    }
    for &v in a.iter().chain(b) {
        if !d.contains(v) {
            return Err(Error::Precondition { vertex: v, reason: "no such vertex".into() });
        }
        if !d.is_interior(v) {
            return Err(Error::Boundary(v));
        }
    }
    Ok(())
}

/// `d` with the H-edges of the complete bipartite graph `A × B` toggled.
pub fn toggle_bipartite(d: &ZxDiagram, a: &[V], b: &[V]) -> Result<ZxDiagram> {
    check_sets(d, a, b)?;
    let mut out = d.clone();
    for &x in a {
        for &y in b {
            if out.connected(x, y) {
                out.remove_edge(x, y);
            } else {
                out.set_edge(x, y, EType::Hadamard);
            }
        }
    }
    Ok(out)
}

/// The four terms `(k, j) ∈ {0,1}²`: `d` with `kπ` added on `A` and `jπ`
/// on `B`. Their weighted sum equals `toggle_bipartite(d, A, B)`.
///
/// The coefficient is `½(−1)^{kj}` up to the √2 power accounting for the
/// edge-count difference between `d` and the toggled diagram. If either
/// set is empty there is nothing to toggle and the single term is `d`.
pub fn bipartite_sum_cut(d: &ZxDiagram, a: &[V], b: &[V]) -> Result<Vec<Term>> {
    check_sets(d, a, b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(vec![(Scalar::one(), d.clone())]);
    }
    let cross = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).filter(|&(x, y)| d.connected(x, y)).count();
    // |E(toggled)| − |E(d)| = |A||B| − 2·cross
    let de = (a.len() * b.len()) as i32 - 2 * cross as i32;
    let mut out = Vec::with_capacity(4);
    for k in 0..2 {
        for j in 0..2 {
            let mut t = d.clone();
            if k == 1 {
                for &x in a {
                    t.add_to_phase(x, Phase::pi());
                }
            }
            if j == 1 {
                for &y in b {
                    t.add_to_phase(y, Phase::pi());
                }
            }
            let mut s = Scalar::sqrt2_pow(-2 - de);
            if k * j == 1 {
                s = -s;
            }
            out.push((s, t));
        }
    }
    Ok(out)
}

/// `Σ s·val(D)` over terms, using the dense oracle for each `D`.
#[cfg(test)]
pub(crate) fn oracle_sum(terms: &[Term]) -> num_complex::Complex64 {
    terms.iter().map(|(s, d)| s.to_complex() * crate::oracle::contract_oracle(d).unwrap()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::VType;
    use crate::oracle::contract_oracle;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() <= 1e-10 * (1.0 + b.norm())
    }

    fn random_graph_like(rng: &mut ChaCha8Rng, n: usize) -> ZxDiagram {
        let mut d = ZxDiagram::new();
        for _ in 0..n {
            let p = if rng.gen_bool(0.5) { Phase::rational(rng.gen_range(0..8), 4) } else { Phase::real(rng.gen_range(0.0..7.0)) };
            d.add_vertex_with_phase(VType::Z, p);
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.45) {
                    d.add_edge(u, v, EType::Hadamard);
                }
            }
        }
        d
    }

    #[test]
    fn isolated_vertex_cut() {
        let mut d = ZxDiagram::new();
        let v = d.add_vertex_with_phase(VType::Z, Phase::rational(1, 3));
        let [(s0, d0), (s1, d1)] = vertex_cut(&d, v).unwrap();
        assert_eq!(d0.num_vertices(), 0);
        assert_eq!(d1.num_vertices(), 0);
        assert!(rel_close((s0 + s1).to_complex(), Scalar::one_plus_phase(Phase::rational(1, 3)).to_complex()));
    }

    #[test]
    fn vertex_cut_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..9);
            let d = random_graph_like(&mut rng, n);
            let want = contract_oracle(&d).unwrap();
            for v in d.vertices() {
                let terms = vertex_cut(&d, v).unwrap();
                assert!(rel_close(oracle_sum(&terms), want));
            }
        }
    }

    #[test]
    fn bipartite_pair_of_lone_spiders() {
        let (a, b) = (Phase::rational(1, 4), Phase::real(1.1));
        let mut d = ZxDiagram::new();
        let x = d.add_vertex_with_phase(VType::Z, a);
        let y = d.add_vertex_with_phase(VType::Z, b);
        let terms = bipartite_sum_cut(&d, &[x], &[y]).unwrap();
        // expand ½ Σ_{kj} (−1)^{kj} (1 + e^{i(α+kπ)})(1 + e^{i(β+jπ)}) by hand;
        // the normalized H-edge contributes one more 1/√2
        let ea = Complex64::from_polar(1.0, a.radians());
        let eb = Complex64::from_polar(1.0, b.radians());
        let mut want = Complex64::new(0.0, 0.0);
        for k in 0..2 {
            for j in 0..2 {
                let sa = if k == 1 { -ea } else { ea };
                let sb = if j == 1 { -eb } else { eb };
                let sign = if k * j == 1 { -1.0 } else { 1.0 };
                want += 0.5 * sign * (1.0 + sa) * (1.0 + sb);
            }
        }
        want /= 2f64.sqrt();
        assert!(rel_close(oracle_sum(&terms), want));
        let mut e = d.clone();
        e.add_edge(x, y, EType::Hadamard);
        assert!(rel_close(oracle_sum(&terms), contract_oracle(&e).unwrap()));
    }

    #[test]
    fn bipartite_sum_matches_toggled_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let d = random_graph_like(&mut rng, 8);
            let mut vs: Vec<V> = (0..8).collect();
            rand::seq::SliceRandom::shuffle(vs.as_mut_slice(), &mut rng);
            let ka = rng.gen_range(1..4);
            let kb = rng.gen_range(1..4);
            let (a, b) = (&vs[..ka], &vs[ka..ka + kb]);
            let terms = bipartite_sum_cut(&d, a, b).unwrap();
            assert_eq!(terms.len(), 4);
            let toggled = toggle_bipartite(&d, a, b).unwrap();
            assert!(rel_close(oracle_sum(&terms), contract_oracle(&toggled).unwrap()));
        }
    }

    #[test]
    fn empty_side_and_overlap() {
        let mut d = ZxDiagram::new();
        let x = d.add_vertex(VType::Z);
        let y = d.add_vertex(VType::Z);
        let terms = bipartite_sum_cut(&d, &[x], &[]).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].1, d);
        assert!(matches!(bipartite_sum_cut(&d, &[x, y], &[y]), Err(Error::Overlap(v)) if v == vec![y]));
    }

    #[test]
    fn boundary_vertex_cannot_be_cut() {
        let mut d = ZxDiagram::new();
        let b = d.add_vertex(VType::Boundary);
        let z = d.add_vertex(VType::Z);
        d.add_edge(b, z, EType::Plain);
        assert!(matches!(vertex_cut(&d, b), Err(Error::Boundary(_))));
        assert!(matches!(vertex_cut(&d, z), Err(Error::Boundary(_))));
    }

    #[test]
    fn nc_count_counts_non_clifford() {
        let mut d = ZxDiagram::new();
        d.add_vertex_with_phase(VType::Z, Phase::rational(1, 2));
        d.add_vertex_with_phase(VType::Z, Phase::pi());
        assert_eq!(nc_count(&d), 0);
        d.add_vertex_with_phase(VType::Z, Phase::rational(1, 4));
        assert_eq!(nc_count(&d), 1);
    }
}
