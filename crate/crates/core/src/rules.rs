//! Rewrite rules on graph-like diagrams and the simplification driver.
//!
//! Scalar bookkeeping: a graph-like closed diagram with edge set `E`
//! evaluates to `2^{-|E|/2} Σ_x e^{iΣ α_v x_v} (−1)^{Σ_E x_u x_v}`. Every
//! rule below sums out one or two bits of that expression analytically
//! and then corrects for the change in `|E|` with a power of √2.

use crate::diagram::{EType, VType, ZxDiagram, V};
use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::scalar::Scalar;

/// Convert to graph-like form: colour-change every X spider, then fuse
/// spiders joined by plain edges. Parallel edges and self-loops are
/// resolved by [`ZxDiagram::add_edge`] as they appear.
pub fn to_graph_like(d: &ZxDiagram) -> ZxDiagram {
    let mut d = d.clone();
    let xs: Vec<V> = d.vertices().filter(|&v| d.vertex_type(v) == VType::X).collect();
    for v in xs {
        d.set_vertex_type(v, VType::Z);
        let inc: Vec<(V, EType)> = d.incident_edges(v).collect();
        for (n, t) in inc {
            d.set_edge(v, n, t.flip());
        }
    }
    loop {
        let plain = d.edges().into_iter().find(|&(u, v, t)| {
            t == EType::Plain && d.vertex_type(u) == VType::Z && d.vertex_type(v) == VType::Z
        });
        let Some((u, v, _)) = plain else { break };
        fuse(&mut d, u, v);
    }
    d
}

/// Merge Z spider `v` into its plain-edge neighbour `u`.
fn fuse(d: &mut ZxDiagram, u: V, v: V) {
    d.remove_edge(u, v);
    d.add_to_phase(u, d.phase(v));
    let inc: Vec<(V, EType)> = d.incident_edges(v).collect();
    d.remove_vertex(v);
    for (n, t) in inc {
        d.add_edge(u, n, t);
    }
}

fn toggle_h(d: &mut ZxDiagram, a: V, b: V) {
    if d.connected(a, b) {
        d.remove_edge(a, b);
    } else {
        d.set_edge(a, b, EType::Hadamard);
    }
}

fn require_spider(d: &ZxDiagram, v: V) -> Result<()> {
    if !d.contains(v) {
        return Err(Error::Precondition { vertex: v, reason: "no such vertex".into() });
    }
    if !d.is_interior(v) {
        return Err(Error::Boundary(v));
    }
    Ok(())
}

/// Remove an interior `±π/2` spider, complementing its neighbourhood.
pub fn local_complement(d: &mut ZxDiagram, v: V) -> Result<()> {
    require_spider(d, v)?;
    let a = d.phase(v);
    if !a.is_proper_clifford() {
        return Err(Error::Precondition { vertex: v, reason: format!("phase {a} is not ±π/2") });
    }
    let e0 = d.num_edges() as i32;
    let nbrs: Vec<V> = d.neighbors(v).collect();
    d.remove_vertex(v);
    for (i, &x) in nbrs.iter().enumerate() {
        d.add_to_phase(x, -a);
        for &y in &nbrs[i + 1..] {
            toggle_h(d, x, y);
        }
    }
    let de = d.num_edges() as i32 - e0;
    let s = d.scalar_mut();
    *s = *s * Scalar::one_plus_phase(a);
    s.mul_sqrt2_pow(de);
    Ok(())
}

/// Remove two adjacent interior Pauli spiders, toggling the edges between
/// the three neighbour classes.
pub fn pivot(d: &mut ZxDiagram, u: V, v: V) -> Result<()> {
    require_spider(d, u)?;
    require_spider(d, v)?;
    if !d.connected(u, v) {
        return Err(Error::Precondition { vertex: u, reason: format!("not adjacent to {v}") });
    }
    let (Some(a), Some(b)) = (d.phase(u).pauli_bit(), d.phase(v).pauli_bit()) else {
        let w = if d.phase(u).is_pauli() { v } else { u };
        return Err(Error::Precondition { vertex: w, reason: "phase is not 0 or π".into() });
    };
    let e0 = d.num_edges() as i32;
    let nu: Vec<V> = d.neighbors(u).filter(|&x| x != v).collect();
    let nv: Vec<V> = d.neighbors(v).filter(|&x| x != u).collect();
    let only_u: Vec<V> = nu.iter().copied().filter(|x| !nv.contains(x)).collect();
    let only_v: Vec<V> = nv.iter().copied().filter(|x| !nu.contains(x)).collect();
    let common: Vec<V> = nu.iter().copied().filter(|x| nv.contains(x)).collect();
    d.remove_vertex(u);
    d.remove_vertex(v);
    for &x in &only_u {
        d.add_to_phase(x, Phase::rational(b as i64, 1));
    }
    for &x in &only_v {
        d.add_to_phase(x, Phase::rational(a as i64, 1));
    }
    for &x in &common {
        d.add_to_phase(x, Phase::rational((a + b + 1) as i64, 1));
    }
    for (p, q) in [(&only_u, &only_v), (&only_u, &common), (&only_v, &common)] {
        for &x in p {
            for &y in q {
                toggle_h(d, x, y);
            }
        }
    }
    let de = d.num_edges() as i32 - e0;
    let s = d.scalar_mut();
    if a * b == 1 {
        *s = -*s;
    }
    s.mul_sqrt2_pow(2 + de);
    Ok(())
}

/// π-copy: a degree-one interior Pauli spider `p` fixes the bit of its
/// neighbour `v`, which is then removed together with `p`.
pub fn pi_copy(d: &mut ZxDiagram, p: V) -> Result<()> {
    require_spider(d, p)?;
    let Some(b) = d.phase(p).pauli_bit() else {
        return Err(Error::Precondition { vertex: p, reason: "phase is not 0 or π".into() });
    };
    if d.degree(p) != 1 {
        return Err(Error::Precondition { vertex: p, reason: "degree is not 1".into() });
    }
    let v = d.neighbors(p).next().expect("degree one");
    require_spider(d, v)?;
    let e0 = d.num_edges() as i32;
    let alpha = d.phase(v);
    let nbrs: Vec<V> = d.neighbors(v).filter(|&x| x != p).collect();
    d.remove_vertex(p);
    d.remove_vertex(v);
    if b == 1 {
        for &x in &nbrs {
            d.add_to_phase(x, Phase::pi());
        }
    }
    let de = d.num_edges() as i32 - e0;
    let s = d.scalar_mut();
    if b == 1 {
        *s = *s * Scalar::from_phase(alpha);
    }
    s.mul_sqrt2_pow(2 + de);
    Ok(())
}

/// Drop a phase-free interior spider of degree two and fuse its neighbours.
pub fn remove_identity(d: &mut ZxDiagram, v: V) -> Result<()> {
    require_spider(d, v)?;
    if !d.phase(v).is_zero() || d.degree(v) != 2 {
        return Err(Error::Precondition { vertex: v, reason: "not a phase-free degree-2 spider".into() });
    }
    let ns: Vec<V> = d.neighbors(v).collect();
    if ns.iter().any(|&n| !d.is_interior(n)) {
        return Err(Error::Boundary(v));
    }
    d.remove_vertex(v);
    // the two H-edges compose to a plain wire, so the neighbours fuse
    let (a, b) = (ns[0].min(ns[1]), ns[0].max(ns[1]));
    d.add_edge(a, b, EType::Plain);
    fuse(d, a, b);
    Ok(())
}

fn remove_isolated(d: &mut ZxDiagram, v: V) {
    let a = d.phase(v);
    d.remove_vertex(v);
    let s = d.scalar_mut();
    *s = *s * Scalar::one_plus_phase(a);
}

/// Exhaustively apply isolated-spider removal, local complementation,
/// pivoting, π-copy and identity removal (lowest vertex ids first).
///
/// Only rules that delete vertices are used, so the result's vertex ids
/// are a subset of the input's. Non-graph-like inputs are converted first.
pub fn full_reduce(d: &ZxDiagram) -> ZxDiagram {
    let mut d = if d.is_graph_like() { d.clone() } else { to_graph_like(d) };
    while reduce_step(&mut d) {}
    d
}

/// Apply one rule if any matches. Returns whether something changed.
pub fn reduce_step(d: &mut ZxDiagram) -> bool {
    let vs: Vec<V> = d.vertices().filter(|&v| d.vertex_type(v) == VType::Z).collect();
    if let Some(&v) = vs.iter().find(|&&v| d.degree(v) == 0) {
        remove_isolated(d, v);
        return true;
    }
    if let Some(&v) = vs.iter().find(|&&v| d.phase(v).is_proper_clifford() && d.is_interior(v)) {
        local_complement(d, v).expect("matched precondition");
        return true;
    }
    for &u in &vs {
        if !d.phase(u).is_pauli() || !d.is_interior(u) {
            continue;
        }
        let partner = d.neighbors(u).find(|&v| v > u && d.phase(v).is_pauli() && d.is_interior(v));
        if let Some(v) = partner {
            pivot(d, u, v).expect("matched precondition");
            return true;
        }
    }
    if let Some(&p) = vs.iter().find(|&&p| {
        d.degree(p) == 1 && d.phase(p).is_pauli() && d.is_interior(p) && {
            let v = d.neighbors(p).next().unwrap();
            d.is_interior(v)
        }
    }) {
        pi_copy(d, p).expect("matched precondition");
        return true;
    }
    if let Some(&v) = vs.iter().find(|&&v| {
        d.phase(v).is_zero() && d.degree(v) == 2 && d.is_interior(v) && d.neighbors(v).all(|n| d.is_interior(n))
    }) {
        remove_identity(d, v).expect("matched precondition");
        return true;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::contract_oracle;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * (1.0 + b.norm())
    }

    fn random_phase(rng: &mut ChaCha8Rng, clifford_only: bool) -> Phase {
        if clifford_only || rng.gen_bool(0.6) {
            Phase::rational(rng.gen_range(0..4), 2)
        } else {
            Phase::rational(rng.gen_range(0..8), 4)
        }
    }

    fn random_zx(rng: &mut ChaCha8Rng, n: usize) -> ZxDiagram {
        let mut d = ZxDiagram::new();
        for _ in 0..n {
            let ty = if rng.gen_bool(0.5) { VType::Z } else { VType::X };
            let p = random_phase(rng, false);
            d.add_vertex_with_phase(ty, p);
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.35) {
                    let t = if rng.gen_bool(0.5) { EType::Plain } else { EType::Hadamard };
                    d.add_edge(u, v, t);
                }
            }
        }
        d
    }

    fn random_graph_like(rng: &mut ChaCha8Rng, n: usize, clifford_only: bool) -> ZxDiagram {
        let mut d = ZxDiagram::new();
        for _ in 0..n {
            let p = random_phase(rng, clifford_only);
            d.add_vertex_with_phase(VType::Z, p);
        }
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.4) {
                    d.add_edge(u, v, EType::Hadamard);
                }
            }
        }
        d
    }

    #[test]
    fn fusion_of_plain_pair() {
        let mut d = ZxDiagram::new();
        let a = d.add_vertex_with_phase(VType::Z, Phase::rational(1, 4));
        let b = d.add_vertex_with_phase(VType::Z, Phase::rational(1, 2));
        d.add_edge(a, b, EType::Plain);
        let g = to_graph_like(&d);
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.phase(a), Phase::rational(3, 4));
    }

    #[test]
    fn graph_like_conversion_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let n = rng.gen_range(1..9);
            let d = random_zx(&mut rng, n);
            let g = to_graph_like(&d);
            assert!(g.is_graph_like());
            assert!(g.check_wellformed().is_ok());
            assert!(rel_close(contract_oracle(&g).unwrap(), contract_oracle(&d).unwrap(), 1e-10));
            assert_eq!(to_graph_like(&g), g);
        }
    }

    #[test]
    fn local_complement_on_lone_spider() {
        let mut d = ZxDiagram::new();
        let v = d.add_vertex_with_phase(VType::Z, Phase::rational(1, 2));
        local_complement(&mut d, v).unwrap();
        assert_eq!(d.num_vertices(), 0);
        assert!(rel_close(d.scalar().to_complex(), Complex64::new(1.0, 1.0), 1e-15));
    }

    #[test]
    fn local_complement_on_triangle() {
        let mut d = ZxDiagram::new();
        let vs: Vec<V> = (0..3).map(|_| d.add_vertex_with_phase(VType::Z, Phase::rational(1, 2))).collect();
        d.add_edge(vs[0], vs[1], EType::Hadamard);
        d.add_edge(vs[1], vs[2], EType::Hadamard);
        d.add_edge(vs[0], vs[2], EType::Hadamard);
        let before = contract_oracle(&d).unwrap();
        local_complement(&mut d, vs[0]).unwrap();
        assert!(!d.connected(vs[1], vs[2]));
        assert!(rel_close(contract_oracle(&d).unwrap(), before, 1e-12));
    }

    #[test]
    fn rules_preserve_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut fired = [0usize; 3];
        for _ in 0..300 {
            let n = rng.gen_range(2..11);
            let d = random_graph_like(&mut rng, n, false);
            let want = contract_oracle(&d).unwrap();
            for v in d.vertices() {
                let mut e = d.clone();
                if d.phase(v).is_proper_clifford() {
                    local_complement(&mut e, v).unwrap();
                    assert!(rel_close(contract_oracle(&e).unwrap(), want, 1e-10));
                    fired[0] += 1;
                }
                let mut e = d.clone();
                if d.phase(v).is_pauli() && d.degree(v) == 1 {
                    pi_copy(&mut e, v).unwrap();
                    assert!(rel_close(contract_oracle(&e).unwrap(), want, 1e-10));
                    fired[1] += 1;
                }
            }
            for (u, v, _) in d.edges() {
                if d.phase(u).is_pauli() && d.phase(v).is_pauli() {
                    let mut e = d.clone();
                    pivot(&mut e, u, v).unwrap();
                    assert!(e.check_wellformed().is_ok());
                    assert!(rel_close(contract_oracle(&e).unwrap(), want, 1e-10));
                    fired[2] += 1;
                }
            }
        }
        assert!(fired.iter().all(|&c| c > 10), "{fired:?}");
    }

    #[test]
    fn identity_removal_preserves_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut fired = 0;
        for _ in 0..300 {
            let n = rng.gen_range(3..10);
            let mut d = random_graph_like(&mut rng, n, false);
            d.set_phase(0, Phase::zero());
            if d.degree(0) != 2 {
                continue;
            }
            let want = contract_oracle(&d).unwrap();
            remove_identity(&mut d, 0).unwrap();
            assert!(rel_close(contract_oracle(&d).unwrap(), want, 1e-10));
            fired += 1;
        }
        assert!(fired > 10);
    }

    #[test]
    fn preconditions_are_reported() {
        let mut d = ZxDiagram::new();
        let a = d.add_vertex_with_phase(VType::Z, Phase::rational(1, 4));
        let b = d.add_vertex_with_phase(VType::Z, Phase::zero());
        d.add_edge(a, b, EType::Hadamard);
        assert!(matches!(local_complement(&mut d, a), Err(Error::Precondition { vertex, .. }) if vertex == a));
        assert!(matches!(pivot(&mut d, a, b), Err(Error::Precondition { vertex, .. }) if vertex == a));
    }

    #[test]
    fn clifford_diagrams_reduce_to_a_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..12);
            let d = random_graph_like(&mut rng, n, true);
            let r = full_reduce(&d);
            assert_eq!(r.num_vertices(), 0);
            assert!(rel_close(r.scalar().to_complex(), contract_oracle(&d).unwrap(), 1e-10));
        }
    }

    #[test]
    fn full_reduce_preserves_value_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.gen_range(1..11);
            let d = random_zx(&mut rng, n);
            let r = full_reduce(&d);
            assert!(r.is_graph_like());
            assert!(rel_close(contract_oracle(&r).unwrap(), contract_oracle(&d).unwrap(), 1e-9));
            assert_eq!(full_reduce(&r), r);
            // a lone non-Clifford spider in a component is always absorbed
            for comp in r.components() {
                assert!(comp.iter().filter(|&&v| r.is_non_clifford(v)).count() >= 2);
            }
        }
    }

    #[test]
    fn non_clifford_only_diagram_is_untouched() {
        let mut d = ZxDiagram::new();
        let vs: Vec<V> = (0..4).map(|_| d.add_vertex_with_phase(VType::Z, Phase::rational(1, 4))).collect();
        for i in 0..4 {
            d.add_edge(vs[i], vs[(i + 1) % 4], EType::Hadamard);
        }
        assert_eq!(full_reduce(&d).num_vertices(), 4);
    }
}
