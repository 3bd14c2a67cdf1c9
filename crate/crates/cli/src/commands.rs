use std::fs;
use std::path::Path;

use arrowmat::decomposition::{
    compaction_factors, is_exact_partition, la_decompose, load_decomposition, reconstruct, save_decomposition,
    verify_arrow_width, ArrowDecomposition, Strategy,
};
use arrowmat::generators::{from_spec, uniform_dense};
use arrowmat::mtx::{read_matrix_market, ReadOptions};
use arrowmat::sim::{
    baseline_15d_sim, decomposition_multiply_sim_with, ledger_summary, storage_report, CommLedger, CostModel,
    LedgerSummary, Routing, SimOptions, StorageReport,
};
use arrowmat::sparse::{dense_spmm_reference, DenseMatrix, LinearArrangement, SparseSymMatrix};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{Algorithm, DecomposeArgs, ModelArgs, SpmmArgs, StatsArgs, StrategyArg, TOOL_VERSION};

/// Dense comparison runs automatically up to this many rows.
pub const ORACLE_MAX_N: usize = 4096;
pub const ORACLE_TOLERANCE: f64 = 1e-12;

pub fn load_input(input: &str, seed: u64, pattern: bool) -> Result<SparseSymMatrix, CliError> {
    let a = match input.strip_prefix("gen:") {
        Some(spec) => from_spec(spec, seed)?,
        None => read_matrix_market(input, ReadOptions { pattern_only: pattern })?,
    };
    Ok(if pattern { a.to_pattern() } else { a })
}

pub fn strategy_of(s: StrategyArg, seed: u64, n: usize) -> Strategy {
    match s {
        StrategyArg::RandomForest => Strategy::RandomForest { seed },
        StrategyArg::SeparatorTree => Strategy::SeparatorTree { seed },
        StrategyArg::Identity => Strategy::Provided(vec![LinearArrangement::identity(n)]),
    }
}

pub fn model_of(m: &ModelArgs) -> Result<CostModel, CliError> {
    Ok(CostModel::new(m.alpha, m.beta)?)
}

pub fn features(n: usize, k: usize, seed: u64, ones: bool) -> DenseMatrix {
    if ones {
        DenseMatrix::from_fn(n, k, |_, _| 1.0)
    } else {
        uniform_dense(n, k, seed)
    }
}

/// Wraps a report with its schema, the tool version and the full config.
pub fn envelope(schema: &str, config: &impl Serialize, body: Value) -> Result<String, CliError> {
    let mut v = json!({"schema": schema, "tool_version": TOOL_VERSION, "config": config});
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn stats(args: &StatsArgs) -> Result<(), CliError> {
    let a = load_input(&args.input.input, args.input.seed, args.input.pattern)?;
    let n = a.n();
    let body = json!({
        "n": n,
        "nnz": a.nnz(),
        "edges": a.edge_count(),
        "nnz_per_row": if n == 0 { 0.0 } else { a.nnz() as f64 / n as f64 },
        "max_degree": a.max_degree(),
        "nonzero_rows": a.nonzero_rows(),
        "symmetric": a.is_symmetric(),
    });
    emit(&envelope("arrowmat.stats/1", args, body)?, None)
}

/// Files a decomposition writes; `--force` removes only these.
fn is_decomposition_file(name: &str) -> bool {
    name == "meta.json"
        || (name.starts_with("part") && name.ends_with(".mtx"))
        || (name.starts_with("perm") && name.ends_with(".txt"))
}

fn prepare_out_dir(dir: &Path, force: bool) -> Result<(), CliError> {
    let Ok(entries) = fs::read_dir(dir) else {
        return Ok(());
    };
    let names: Vec<String> =
        entries.filter_map(|e| e.ok()).map(|e| e.file_name().to_string_lossy().into_owned()).collect();
    if names.is_empty() {
        return Ok(());
    }
    if !force {
        return Err(CliError::Io(format!("{} is not empty; pass --force to replace it", dir.display())));
    }
    if let Some(other) = names.iter().find(|n| !is_decomposition_file(n)) {
        return Err(CliError::Io(format!("{} holds {other}, which is not part of a decomposition", dir.display())));
    }
    for n in names {
        fs::remove_file(dir.join(n))?;
    }
    Ok(())
}

#[derive(Serialize)]
pub struct DecompositionChecks {
    pub arrow_width: bool,
    pub reconstruct: bool,
}

pub fn decomposition_body(d: &ArrowDecomposition, a: &SparseSymMatrix) -> (Value, DecompositionChecks) {
    let checks = DecompositionChecks {
        arrow_width: d.parts().iter().all(|p| verify_arrow_width(&p.arrow).ok),
        reconstruct: is_exact_partition(d, a),
    };
    let body = json!({
        "n": d.n(),
        "nnz": a.nnz(),
        "b": d.b(),
        "strategy": d.strategy(),
        "order": d.order(),
        "part_nnz": d.part_nnz(),
        "part_nnz_rows": d.part_nnz_rows(),
        "lambda": d.lambdas(),
        "compaction": compaction_factors(d),
        "checks": &checks,
    });
    (body, checks)
}

pub fn decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    if args.width < 2 {
        return Err(CliError::Usage(format!("--width must be >= 2, got {}", args.width)));
    }
    let a = load_input(&args.input.input, args.input.seed, args.input.pattern)?;
    prepare_out_dir(&args.out, args.force)?;
    let d = la_decompose(&a, args.width, &strategy_of(args.strategy, args.input.seed, a.n()))?;
    save_decomposition(&d, &args.out)?;
    let (body, checks) = decomposition_body(&d, &a);
    emit(&envelope("arrowmat.decompose/1", args, body)?, None)?;
    if !(checks.arrow_width && checks.reconstruct) {
        return Err(CliError::Verification("decomposition checks failed".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct Iteration {
    iteration: usize,
    warmup: bool,
    summary: LedgerSummary,
}

#[derive(Serialize)]
struct Oracle {
    checked: bool,
    rel_error: Option<f64>,
    pass: Option<bool>,
}

/// One simulated multiply, whichever algorithm.
pub struct SpmmRun {
    pub y: DenseMatrix,
    pub ledger: CommLedger,
}

pub fn checksum(y: &DenseMatrix) -> f64 {
    y.data().iter().sum()
}

pub fn spmm(args: &SpmmArgs) -> Result<(), CliError> {
    let model = model_of(&args.model)?;
    if args.features == 0 {
        return Err(CliError::Usage("--features must be >= 1".into()));
    }
    let (a, decomposition) = match args.algorithm {
        Algorithm::Arrow => {
            let d = load_decomposition(&args.input)?;
            (reconstruct(&d), Some(d))
        }
        Algorithm::OneFiveD => {
            arrowmat::sim::check_grid(args.ranks, args.repl)?;
            (load_input(&args.input, args.seed, args.pattern)?, None)
        }
    };
    let n = a.n();
    let k = args.features;
    let mut body = json!({"algorithm": args.algorithm, "n": n, "nnz": a.nnz(), "k": k});
    if args.iters == 0 {
        return emit(&envelope("arrowmat.spmm/1", args, body)?, args.out.as_deref());
    }
    let x = features(n, k, args.seed, args.ones);
    let routing = decomposition.as_ref().map(Routing::new).transpose()?;
    let mut iterations = Vec::with_capacity(args.iters);
    let mut last = None;
    for it in 0..args.iters {
        let run = match (&decomposition, &routing) {
            (Some(d), Some(r)) => {
                let run = decomposition_multiply_sim_with(d, r, &x, model, SimOptions::default())?;
                SpmmRun { y: run.y, ledger: run.ledger }
            }
            _ => {
                let run = baseline_15d_sim(&a, &x, args.ranks, args.repl, model)?;
                SpmmRun { y: run.y, ledger: run.ledger }
            }
        };
        iterations.push(Iteration { iteration: it, warmup: it == 0, summary: ledger_summary(&run.ledger) });
        last = Some(run);
    }
    let last = last.expect("iters >= 1");
    let oracle = if n <= ORACLE_MAX_N || args.force_oracle {
        let err = last.y.rel_inf_error(&dense_spmm_reference(&a, &x)?);
        Oracle { checked: true, rel_error: Some(err), pass: Some(err <= ORACLE_TOLERANCE) }
    } else {
        Oracle { checked: false, rel_error: None, pass: None }
    };
    let storage: Option<StorageReport> = decomposition.as_ref().map(|d| storage_report(d, k));
    let obj = body.as_object_mut().expect("object");
    obj.insert("ranks".into(), json!(last.ledger.ranks()));
    obj.insert("max_rank_volume_words".into(), json!(last.ledger.max_recv_words()));
    obj.insert("total_volume_words".into(), json!(last.ledger.total_words()));
    obj.insert("critical_path".into(), json!(last.ledger.critical_path_time()));
    obj.insert("iterations".into(), serde_json::to_value(&iterations)?);
    obj.insert("storage".into(), serde_json::to_value(&storage)?);
    obj.insert("checksum".into(), json!(checksum(&last.y)));
    let failed = oracle.pass == Some(false);
    obj.insert("oracle".into(), serde_json::to_value(&oracle)?);
    emit(&envelope("arrowmat.spmm/1", args, body)?, args.out.as_deref())?;
    if failed {
        return Err(CliError::Verification(format!(
            "relative error {:e} above {ORACLE_TOLERANCE:e}",
            oracle.rel_error.unwrap_or(f64::NAN)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_inputs() {
        let a = load_input("gen:star:8", 0, false).unwrap();
        assert_eq!(a.max_degree(), 8);
        assert!(matches!(load_input("gen:nope", 0, false), Err(CliError::Usage(_))));
        assert!(matches!(load_input("/no/such/file.mtx", 0, false), Err(CliError::Io(_))));
    }

    #[test]
    fn envelope_order() {
        let text = envelope("s/1", &json!({"a": 1}), json!({"z": 2})).unwrap();
        let schema = text.find("\"schema\"").unwrap();
        let version = text.find("\"tool_version\"").unwrap();
        let z = text.find("\"z\"").unwrap();
        assert!(schema < version && version < z);
    }

    #[test]
    fn force_only_clears_decomposition_files() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("meta.json"), "{}").unwrap();
        assert!(prepare_out_dir(dir.path(), false).is_err());
        fs::write(dir.path().join("notes.txt"), "keep").unwrap();
        assert!(prepare_out_dir(dir.path(), true).is_err());
        assert!(dir.path().join("notes.txt").exists());
        fs::remove_file(dir.path().join("notes.txt")).unwrap();
        prepare_out_dir(dir.path(), true).unwrap();
        assert!(!dir.path().join("meta.json").exists());
    }
}
