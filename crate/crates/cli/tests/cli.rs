use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_zxwidth"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zxwidth-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run_ok(cmd: &mut Command) -> String {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

const CIRCUIT: &str = "# small test circuit
QUBITS 3
H 0
CNOT 0 1
RZ 1 0.7
GADGET XZ pi/4 0 2
S 2
RZ 0 3pi/4
H 1
";

#[test]
fn simulate_variants_agree() {
    let path = scratch("c.txt");
    std::fs::write(&path, CIRCUIT).unwrap();
    let mut amps = Vec::new();
    for extra in [&[][..], &["--mixed"], &["--mode", "treewidth"], &["--no-clifford-base", "--jobs", "2"], &["--planned", "--trees", "50"]] {
        let v = json(&run_ok(bin().arg("simulate").arg(&path).args(["--steps", "2000"]).args(extra)));
        for key in ["algorithm", "n_spiders", "nc", "width_used", "leaves", "alpha", "wall_time_ms", "amplitude_re", "amplitude_im", "seed"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        amps.push((v["amplitude_re"].as_f64().unwrap(), v["amplitude_im"].as_f64().unwrap()));
    }
    for a in &amps {
        assert!((a.0 - amps[0].0).abs() < 1e-9 && (a.1 - amps[0].1).abs() < 1e-9, "{amps:?}");
    }
}

#[test]
fn plan_writes_a_tree() {
    let path = scratch("p.txt");
    std::fs::write(&path, run_ok(bin().args(["generate", "pauli", "--params", "qubits=6;gadgets=6", "--seed", "2"]))).unwrap();
    let tree = scratch("tree.json");
    let v = json(&run_ok(bin().arg("plan").arg(&path).args(["--trees", "50", "--steps", "2000", "--out"]).arg(&tree)));
    assert!(v["alpha"].as_f64().unwrap() >= 0.0);
    let saved = json(&std::fs::read_to_string(&tree).unwrap());
    assert_eq!(saved["term_count"], v["term_count"]);
}

#[test]
fn bench_writes_the_csv_schema() {
    let out = scratch("r.csv");
    run_ok(bin().args(["bench", "er", "--grid", "n=8;p=0.2,0.6", "--seeds", "2", "--steps", "1000", "--trees", "20", "--out"]).arg(&out));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "family,n_qubits,n_gates,n_vertices,nc,p,rank_width,mixed_rank_width,alpha,terms_log2,seed,wall_ms");
    assert_eq!(lines.count(), 4);
}

#[test]
fn widths_on_a_diagram_file() {
    let path = scratch("g.json");
    std::fs::write(&path, run_ok(bin().args(["generate", "er", "--params", "n=9;p=1"]))).unwrap();
    let v = json(&run_ok(bin().arg("widths").arg(&path).args(["--steps", "2000"])));
    assert_eq!(v["rank_width"], 1);
    assert_eq!(v["tree_width"], 8);
}

#[test]
fn errors_are_reported() {
    let path = scratch("bad.txt");
    std::fs::write(&path, "QUBITS 2\nCNOT 0 5\n").unwrap();
    let out = bin().arg("simulate").arg(&path).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = bin().args(["bench", "pauli", "--grid", "n=3", "--out", "/dev/null"]).output().unwrap();
    assert!(!out.status.success());
}
