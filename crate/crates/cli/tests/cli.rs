use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn arrowmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_arrowmat")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn decompose(input: &str, width: &str, dir: &Path) -> Value {
    json(&arrowmat(&["decompose", "--input", input, "-w", width, "--out", dir.to_str().unwrap()]))
}

#[test]
fn stats_reports_shape() {
    let v = json(&arrowmat(&["stats", "--input", "gen:path:10"]));
    assert_eq!(v["schema"], "arrowmat.stats/1");
    assert_eq!(v["n"], 10);
    assert_eq!(v["nnz"], 18);
    assert_eq!(v["max_degree"], 2);
}

#[test]
fn star_with_ones_gives_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let d = decompose("gen:star:6", "2", dir.path());
    assert_eq!(d["order"], 1);
    assert_eq!(d["checks"]["reconstruct"], true);
    let v = json(&arrowmat(&["spmm", "--input", dir.path().to_str().unwrap(), "-c", "2", "-z", "3", "--ones"]));
    // A·1 has row sums 6 (hub) and 1 (each leaf)
    assert_eq!(v["checksum"], 24.0);
    assert_eq!(v["oracle"]["pass"], true);
    assert_eq!(v["iterations"].as_array().unwrap().len(), 3);
    assert_eq!(v["iterations"][0]["warmup"], true);
    assert_eq!(v["iterations"][1]["warmup"], false);
}

#[test]
fn decomposition_directory_layout() {
    let dir = tempfile::tempdir().unwrap();
    let d = decompose("gen:tree:400", "8", dir.path());
    let order = d["order"].as_u64().unwrap() as usize;
    assert!(order >= 1);
    for i in 0..order {
        assert!(dir.path().join(format!("part{i}.mtx")).exists());
        assert!(dir.path().join(format!("perm{i}.txt")).exists());
    }
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["order"], order);
}

#[test]
fn refuses_to_overwrite_without_force() {
    let dir = tempfile::tempdir().unwrap();
    decompose("gen:cycle:12", "4", dir.path());
    let out = arrowmat(&["decompose", "--input", "gen:cycle:12", "-w", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = arrowmat(&[
        "decompose", "--input", "gen:cycle:12", "-w", "4", "--out", dir.path().to_str().unwrap(), "--force",
    ]);
    assert!(out.status.success());
}

#[test]
fn baseline_grid_volume() {
    // 2x2 grid, n = 16, k = 3: each X tile holds 8·3 = 24 words
    let v = json(&arrowmat(&[
        "spmm", "--input", "gen:cycle:16", "--algorithm", "1.5d", "-p", "4", "--repl", "2", "-c", "3", "-z", "1",
    ]));
    let phases = v["iterations"][0]["summary"]["phases"].as_array().unwrap();
    let x = phases.iter().find(|p| p["name"] == "x_broadcast").unwrap();
    assert_eq!(x["max_recv_words"], 24);
    assert_eq!(v["oracle"]["pass"], true);
}

#[test]
fn zero_iterations_only_echo_config() {
    let v = json(&arrowmat(&["spmm", "--input", "gen:path:8", "--algorithm", "1.5d", "-z", "0", "--seed", "5"]));
    assert_eq!(v["config"]["seed"], 5);
    assert_eq!(v["config"]["iters"], 0);
    assert!(v.get("iterations").is_none());
    assert!(v.get("checksum").is_none());
}

#[test]
fn spmm_report_is_reproducible() {
    let args = ["spmm", "--input", "gen:powerlaw:600", "--algorithm", "1.5d", "-p", "16", "--repl", "2", "-z", "2"];
    let a = arrowmat(&args);
    let b = arrowmat(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn bench_csv_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = arrowmat(&[
            "bench", "--input", "gen:tree:256,gen:powerlaw:512", "-p", "4,16", "--repl", "1,2", "--seed", "1,2",
            "-c", "4", "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let first = run("a.csv");
    assert_eq!(first, run("b.csv"));
    let text = String::from_utf8(first).unwrap();
    // header + 2 inputs × 2 seeds × 2 rank counts × (1 arrow + 2 baseline)
    assert_eq!(text.lines().count(), 1 + 24);
    assert!(text.lines().next().unwrap().starts_with("schema,tool_version,dataset"));
}

#[test]
fn exit_codes() {
    assert_eq!(arrowmat(&["nonsense"]).status.code(), Some(1));
    assert_eq!(arrowmat(&["--help"]).status.code(), Some(0));
    assert_eq!(arrowmat(&["stats", "--input", "gen:unknown:3"]).status.code(), Some(1));
    assert_eq!(arrowmat(&["stats", "--input", "/definitely/missing.mtx"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = arrowmat(&["decompose", "--input", "gen:path:5", "-w", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(arrowmat(&["spmm", "--input", "gen:path:9", "--algorithm", "1.5d", "-p", "4", "--repl", "4"]).status.code(), Some(1));
}

#[test]
fn matrix_market_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.mtx");
    std::fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real symmetric\n4 4 3\n2 1 1.5\n3 2 2.0\n4 4 3.0\n",
    )
    .unwrap();
    let v = json(&arrowmat(&["stats", "--input", path.to_str().unwrap()]));
    assert_eq!(v["n"], 4);
    assert_eq!(v["nnz"], 5);
}
