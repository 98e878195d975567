//! wasm-bindgen exports for the static demo page in `www/`. Every function
//! takes plain numbers or text and returns a JSON string.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use zxwidth::bench::{gen_erdos_renyi, to_diagram, Circuit};
use zxwidth::decomp::{anneal_rank_decomposition_within, tree_decomposition_heuristic, AnnealConfig, Objective};
use zxwidth::rules::full_reduce;
use zxwidth::sim::id_graph;
use zxwidth::{build_cut_tree, effective_alpha, simulate, PlannerConfig, SimConfig};

#[derive(Serialize)]
struct ErReport {
    n: usize,
    edges: usize,
    rank_width: usize,
    mixed_rank_width: usize,
    tree_width: usize,
    alpha: f64,
    terms_log2: f64,
    edge_list: Vec<(usize, usize)>,
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn error_json(e: impl std::fmt::Display) -> String {
    to_json(&serde_json::json!({ "error": e.to_string() }))
}

/// Widths and planned alpha of a random graph with generic phases.
pub fn er_report(n: usize, p: f64, seed: u64, steps: usize, trees: usize) -> String {
    let d = gen_erdos_renyi(n, p, seed);
    let (g, present) = id_graph(&d);
    let acfg = AnnealConfig::with_steps(steps, seed);
    let rd = anneal_rank_decomposition_within(&g, &present, Objective::CutRank, &acfg);
    let md = anneal_rank_decomposition_within(&g, &present, Objective::Mixed, &acfg);
    let ct = build_cut_tree(&d, &md, &PlannerConfig { trees, seed, ..PlannerConfig::default() });
    to_json(&ErReport {
        n,
        edges: g.num_edges(),
        rank_width: rd.width(&g),
        mixed_rank_width: md.mixed_width(&g),
        tree_width: tree_decomposition_heuristic(&g, &present).width(),
        alpha: ct.alpha,
        terms_log2: ct.terms_log2(),
        edge_list: g.edges(),
    })
}

/// `[[a, α_eff], ...]` for a cut of cost `w` splitting `n` non-Clifford
/// spiders into `a` and `n − w − a` (the cut vertices removed).
pub fn alpha_curve(w: usize, n: usize) -> String {
    let points: Vec<(usize, f64)> = (0..=n.saturating_sub(w))
        .filter_map(|a| {
            let b = n.saturating_sub(w).saturating_sub(a);
            effective_alpha(w as f64, a, b, n).ok().map(|x| (a, x))
        })
        .collect();
    to_json(&points)
}

/// Amplitude `⟨0|C|0⟩` of a circuit in the text format, with run statistics.
pub fn simulate_circuit(text: &str, algorithm: u8, mixed: bool, steps: usize) -> String {
    let c: Circuit = match text.parse() {
        Ok(c) => c,
        Err(e) => return error_json(e),
    };
    if !(1..=4).contains(&algorithm) {
        return error_json("algorithm must be 1, 2, 3 or 4");
    }
    let d = to_diagram(&c);
    let cfg = SimConfig { mixed, anneal_steps: steps, ..SimConfig::algorithm(algorithm) };
    match simulate(&d, &cfg) {
        Ok(r) => {
            let reduced = full_reduce(&d);
            to_json(&serde_json::json!({
                "record": r.record(&cfg),
                "stats": r.stats,
                "spiders_before_simplification": d.num_vertices(),
                "nc_after_simplification": reduced.nc_count(),
            }))
        }
        Err(e) => error_json(e),
    }
}

#[wasm_bindgen(js_name = erReport)]
pub fn er_report_js(n: usize, p: f64, seed: u32, steps: usize, trees: usize) -> String {
    er_report(n.clamp(1, 40), p.clamp(0.0, 1.0), seed as u64, steps, trees)
}

#[wasm_bindgen(js_name = alphaCurve)]
pub fn alpha_curve_js(w: usize, n: usize) -> String {
    alpha_curve(w, n.min(512))
}

#[wasm_bindgen(js_name = simulateCircuit)]
pub fn simulate_circuit_js(text: &str, algorithm: u8, mixed: bool, steps: usize) -> String {
    simulate_circuit(text, algorithm, mixed, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_report_is_json() {
        let v: serde_json::Value = serde_json::from_str(&er_report(10, 1.0, 1, 500, 20)).unwrap();
        assert_eq!(v["rank_width"], 1);
        assert_eq!(v["edges"], 45);
    }

    #[test]
    fn alpha_curve_balanced_point() {
        let v: Vec<(usize, f64)> = serde_json::from_str(&alpha_curve(2, 10)).unwrap();
        let (_, mid) = v.iter().find(|(a, _)| *a == 4).unwrap();
        assert!((mid - 3.0 / 6.0).abs() < 1e-10);
    }

    #[test]
    fn simulate_reports_errors_as_json() {
        let v: serde_json::Value = serde_json::from_str(&simulate_circuit("QUBITS 1\nX 0", 4, false, 100)).unwrap();
        assert!(v["error"].as_str().unwrap().contains("line 2"));
        let v: serde_json::Value = serde_json::from_str(&simulate_circuit("QUBITS 1\nH 0\nH 0", 4, false, 100)).unwrap();
        assert!((v["record"]["amplitude_re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn page_example_circuit_parses() {
        let page = include_str!("../www/index.html");
        let start = page.find("QUBITS").unwrap();
        let text = &page[start..start + page[start..].find("</textarea>").unwrap()];
        let v: serde_json::Value = serde_json::from_str(&simulate_circuit(text, 4, true, 500)).unwrap();
        assert!(v.get("error").is_none(), "{v}");
    }
}
