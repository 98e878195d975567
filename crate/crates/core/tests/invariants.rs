mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zxwidth::cuts::{bipartite_sum_cut, toggle_bipartite, vertex_cut};
use zxwidth::graph::Graph;
use zxwidth::oracle::contract_oracle;
use zxwidth::rules::{full_reduce, to_graph_like};
use zxwidth::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (2usize..12).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = Graph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cut_rank_is_symmetric_and_lc_invariant(g in graph_strategy(), mask in any::<u32>(), v in 0usize..12) {
        let n = g.n();
        let x = g.set_of((0..n).filter(|i| mask >> i & 1 == 1));
        let mut y = g.full_set();
        y.difference_with(&x);
        prop_assert_eq!(g.cut_rank(&x), g.cut_rank(&y));
        let mut h = g.clone();
        h.local_complement(v % n);
        prop_assert_eq!(g.cut_rank(&x), h.cut_rank(&x));
        prop_assert_eq!(g.mixed_score_within(&x, &g.full_set()), g.mixed_score_within(&y, &g.full_set()));
    }

    #[test]
    fn simplification_preserves_value(seed in any::<u64>(), n in 1usize..11) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, n);
        let want = contract_oracle(&d).unwrap();
        let g = to_graph_like(&d);
        prop_assert!(g.is_graph_like());
        prop_assert!(rel_err(contract_oracle(&g).unwrap(), want) < 1e-10);
        let r = full_reduce(&d);
        prop_assert!(rel_err(contract_oracle(&r).unwrap(), want) < 1e-10);
    }

    #[test]
    fn cuts_preserve_value(seed in any::<u64>(), n in 2usize..10, split in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = to_graph_like(&random_diagram(&mut rng, n));
        let vs: Vec<V> = d.vertices().collect();
        prop_assume!(vs.len() >= 2);
        let want = contract_oracle(&d).unwrap();
        let terms = vertex_cut(&d, vs[0]).unwrap();
        let got: num_complex::Complex64 = terms.iter().map(|(s, t)| s.to_complex() * contract_oracle(t).unwrap()).sum();
        prop_assert!(rel_err(got, want) < 1e-10);
        let k = split % (vs.len() - 1) + 1;
        let (a, b) = vs.split_at(k);
        let toggled = toggle_bipartite(&d, a, b).unwrap();
        let got: num_complex::Complex64 =
            bipartite_sum_cut(&d, a, b).unwrap().iter().map(|(s, t)| s.to_complex() * contract_oracle(t).unwrap()).sum();
        prop_assert!(rel_err(got, contract_oracle(&toggled).unwrap()) < 1e-10);
    }

    #[test]
    fn simulate_agrees_with_oracle(seed in any::<u64>(), n in 1usize..11, k in 1u8..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_diagram(&mut rng, n);
        let cfg = SimConfig { simplify: seed % 2 == 0, anneal_steps: 500, ..SimConfig::algorithm(k) };
        let r = simulate(&d, &cfg).unwrap();
        prop_assert!(rel_err(r.amplitude, contract_oracle(&d).unwrap()) < 1e-9);
    }

    #[test]
    fn effective_alpha_solves_its_recurrence(w in 1u32..10, n in 2usize..50, a_frac in 0.0f64..1.0, b_frac in 0.0f64..1.0) {
        let a = ((n - 1) as f64 * a_frac) as usize;
        let b = ((n - a) as f64 * b_frac).min((n - 1) as f64) as usize;
        let alpha = effective_alpha(w as f64, a, b, n).unwrap();
        let rhs = w as f64 + ((alpha * a as f64).exp2() + (alpha * b as f64).exp2()).log2();
        prop_assert!((alpha * n as f64 - rhs).abs() < 1e-7);
    }
}
