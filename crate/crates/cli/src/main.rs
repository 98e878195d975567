use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use zxwidth::bench::{run_instance, to_diagram, BenchConfig, BenchRow, Circuit, Instance};
use zxwidth::decomp::{anneal_rank_decomposition_within, tree_decomposition_heuristic, AnnealConfig, Objective};
use zxwidth::plan::execute_cut_tree;
use zxwidth::rules::full_reduce;
use zxwidth::sim::{id_graph, RunRecord};
use zxwidth::{build_cut_tree, simulate, Mode, PlannerConfig, SimConfig, ZxDiagram};

#[derive(Parser)]
#[command(name = "zxwidth", version, about = "Strong simulation of ZX-diagrams by width-guided cutting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Rankwidth,
    Treewidth,
}

#[derive(Copy, Clone, ValueEnum)]
enum Family {
    Er,
    Cliffordrz,
    Pauli,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the amplitude of a circuit (⟨0|C|0⟩) or the value of a closed diagram.
    Simulate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "rankwidth")]
        mode: ModeArg,
        /// Cut with greedy mixed decompositions (rank-width mode).
        #[arg(long)]
        mixed: bool,
        /// Expand diagrams with at most this many non-Clifford spiders by plain vertex cuts.
        #[arg(long, default_value_t = 0)]
        threshold: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Recurse down to single spiders instead of stopping at Clifford diagrams.
        #[arg(long)]
        no_clifford_base: bool,
        /// Skip simplification before and between cuts.
        #[arg(long)]
        no_simplify: bool,
        #[arg(long, default_value_t = AnnealConfig::default().steps)]
        steps: usize,
        /// Plan a cut tree first and execute it (rank-width, mixed cuts).
        #[arg(long)]
        planned: bool,
        #[arg(long, default_value_t = PlannerConfig::default().trees)]
        trees: usize,
    },
    /// Plan a tree of cuts and report its term count and alpha without executing it.
    Plan {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = PlannerConfig::default().trees)]
        trees: usize,
        #[arg(long, default_value_t = PlannerConfig::default().temperature)]
        temperature: f64,
        #[arg(long, default_value_t = AnnealConfig::default().steps)]
        steps: usize,
        /// Plain bipartite decompositions instead of mixed ones.
        #[arg(long)]
        no_mixed: bool,
        /// Write the full cut tree as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a benchmark grid and write one CSV row per instance.
    Bench {
        #[arg(value_enum)]
        family: Family,
        /// Parameter grid, e.g. `n=12,18;p=0.1,0.5`. Keys: er n,p; cliffordrz qubits,gates,p_phase; pauli qubits,gadgets.
        #[arg(long, default_value = "")]
        grid: String,
        /// Seeds 0..seeds per grid point.
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = AnnealConfig::default().steps)]
        steps: usize,
        #[arg(long, default_value_t = PlannerConfig::default().trees)]
        trees: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Annealed rank-width, mixed rank-width and heuristic tree-width of a diagram.
    Widths {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = AnnealConfig::default().steps)]
        steps: usize,
        /// Measure the diagram as given, without simplifying first.
        #[arg(long)]
        raw: bool,
    },
    /// Write a generated benchmark instance (circuit text, or diagram JSON for er).
    Generate {
        #[arg(value_enum)]
        family: Family,
        /// Parameters, e.g. `qubits=8;gates=100`.
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A diagram JSON file (starts with `{`) or a circuit file.
fn load(path: &Path) -> Result<ZxDiagram> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        Ok(ZxDiagram::from_json(&text)?)
    } else {
        let c: Circuit = text.parse()?;
        Ok(to_diagram(&c))
    }
}

fn parse_grid(s: &str) -> Result<BTreeMap<String, Vec<f64>>> {
    let mut out = BTreeMap::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, values) = part.split_once('=').ok_or_else(|| anyhow!("grid entry `{part}` has no `=`"))?;
        let values: Vec<f64> = values
            .split(',')
            .map(|v| v.trim().parse().with_context(|| format!("bad value `{v}` for {key}")))
            .collect::<Result<_>>()?;
        out.insert(key.trim().to_string(), values);
    }
    Ok(out)
}

fn instances(family: Family, grid: &BTreeMap<String, Vec<f64>>) -> Result<Vec<Instance>> {
    let (keys, defaults): (&[&str], &[f64]) = match family {
        Family::Er => (&["n", "p"], &[12.0, 0.5]),
        Family::Cliffordrz => (&["qubits", "gates", "p_phase"], &[8.0, 100.0, 0.2]),
        Family::Pauli => (&["qubits", "gadgets"], &[8.0, 16.0]),
    };
    if let Some(k) = grid.keys().find(|k| !keys.contains(&k.as_str())) {
        bail!("unknown parameter `{k}`; expected one of {keys:?}");
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for (k, d) in keys.iter().zip(defaults) {
        let values = grid.get(*k).cloned().unwrap_or_else(|| vec![*d]);
        points = points.into_iter().flat_map(|p| values.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    Ok(points
        .into_iter()
        .map(|p| match family {
            Family::Er => Instance::Er { n: p[0] as usize, p: p[1] },
            Family::Cliffordrz => Instance::CliffordRz { qubits: p[0] as usize, gates: p[1] as usize, p_phase: p[2] },
            Family::Pauli => Instance::Pauli { qubits: p[0] as usize, gadgets: p[1] as usize },
        })
        .collect())
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

#[derive(Serialize)]
struct PlanSummary {
    nc: usize,
    n_vertices: usize,
    term_count: String,
    terms_log2: f64,
    alpha: f64,
    depth: usize,
    max_width: usize,
}

#[derive(Serialize)]
struct Widths {
    n_vertices: usize,
    nc: usize,
    rank_width: usize,
    mixed_rank_width: usize,
    tree_width: usize,
}

fn simulate_planned(d: &ZxDiagram, seed: u64, jobs: usize, steps: usize, trees: usize) -> Result<()> {
    let start = Instant::now();
    let d = full_reduce(d);
    let (g, present) = id_graph(&d);
    let rd = anneal_rank_decomposition_within(&g, &present, Objective::Mixed, &AnnealConfig::with_steps(steps, seed));
    let ct = build_cut_tree(&d, &rd, &PlannerConfig { trees, seed, ..PlannerConfig::default() });
    let ex = execute_cut_tree(&d, &ct, jobs)?;
    print_json(&RunRecord {
        algorithm: "planned".into(),
        n_spiders: d.num_vertices(),
        nc: ct.nc,
        width_used: ct.root.max_width(),
        leaves: ex.leaves,
        alpha: ct.alpha,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        amplitude_re: ex.amplitude.re,
        amplitude_im: ex.amplitude.im,
        seed,
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { file, mode, mixed, threshold, seed, jobs, no_clifford_base, no_simplify, steps, planned, trees } => {
            let d = load(&file)?;
            if planned {
                return simulate_planned(&d, seed, jobs, steps, trees);
            }
            let cfg = SimConfig {
                mode: match mode {
                    ModeArg::Rankwidth => Mode::RankWidth,
                    ModeArg::Treewidth => Mode::TreeWidth,
                },
                clifford_base: !no_clifford_base,
                mixed,
                hybrid_threshold: threshold,
                seed,
                jobs,
                simplify: !no_simplify,
                recompute_per_level: false,
                anneal_steps: steps,
            };
            let r = simulate(&d, &cfg)?;
            print_json(&r.record(&cfg))
        }
        Command::Plan { file, seed, trees, temperature, steps, no_mixed, out } => {
            let d = full_reduce(&load(&file)?);
            let (g, present) = id_graph(&d);
            let objective = if no_mixed { Objective::CutRank } else { Objective::Mixed };
            let rd = anneal_rank_decomposition_within(&g, &present, objective, &AnnealConfig::with_steps(steps, seed));
            let ct = build_cut_tree(&d, &rd, &PlannerConfig { temperature, trees, seed, mixed: !no_mixed });
            if let Some(path) = out {
                fs::write(&path, ct.to_json()).with_context(|| format!("writing {}", path.display()))?;
            }
            print_json(&PlanSummary {
                nc: ct.nc,
                n_vertices: d.num_vertices(),
                term_count: ct.term_count.to_string(),
                terms_log2: ct.terms_log2(),
                alpha: ct.alpha,
                depth: ct.root.depth(),
                max_width: ct.root.max_width(),
            })
        }
        Command::Bench { family, grid, seeds, out, steps, trees, jobs } => {
            let points = instances(family, &parse_grid(&grid)?)?;
            let cfg = BenchConfig { anneal_steps: steps, planner: PlannerConfig { trees, ..PlannerConfig::default() } };
            let work: Vec<(Instance, u64)> = points.iter().flat_map(|p| (0..seeds).map(move |s| (p.clone(), s))).collect();
            let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?;
            let rows: Vec<BenchRow> = pool.install(|| work.par_iter().map(|(inst, s)| run_instance(inst, *s, &cfg)).collect());
            let mut w = csv::Writer::from_path(&out).with_context(|| format!("writing {}", out.display()))?;
            for row in &rows {
                w.serialize(row)?;
            }
            w.flush()?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
            Ok(())
        }
        Command::Widths { file, seed, steps, raw } => {
            let mut d = load(&file)?;
            if !raw {
                d = full_reduce(&d);
            }
            let (g, present) = id_graph(&d);
            let acfg = AnnealConfig::with_steps(steps, seed);
            let (rank_width, mixed_rank_width) = if d.num_vertices() == 0 {
                (0, 0)
            } else {
                let rd = anneal_rank_decomposition_within(&g, &present, Objective::CutRank, &acfg);
                let md = anneal_rank_decomposition_within(&g, &present, Objective::Mixed, &acfg);
                (rd.width(&g), md.mixed_width(&g))
            };
            print_json(&Widths {
                n_vertices: d.num_vertices(),
                nc: d.nc_count(),
                rank_width,
                mixed_rank_width,
                tree_width: tree_decomposition_heuristic(&g, &present).width(),
            })
        }
        Command::Generate { family, params, seed } => {
            let grid = parse_grid(&params)?;
            if let Some((k, v)) = grid.iter().find(|(_, v)| v.len() != 1) {
                bail!("parameter `{k}` needs exactly one value, got {}", v.len());
            }
            let inst = instances(family, &grid)?.remove(0);
            match inst.circuit(seed) {
                Some(c) => print!("{c}"),
                None => println!("{}", inst.diagram(seed).to_json()),
            }
            Ok(())
        }
    }
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
