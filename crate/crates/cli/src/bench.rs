//! Parameter sweeps. Cells run in parallel; rows are written in sweep order.

use std::fs;
use std::io::Write;

use arrowmat::decomposition::la_decompose;
use arrowmat::exec::{self, Execution};
use arrowmat::sim::{baseline_15d_sim, decomposition_multiply_sim_with, storage_report, Routing, SimOptions};
use arrowmat::sparse::SparseSymMatrix;
use serde::Serialize;

use crate::commands::{features, load_input, model_of, strategy_of};
use crate::error::CliError;
use crate::{Algorithm, BenchArgs, TOOL_VERSION};

pub const BENCH_SCHEMA: &str = "arrowmat.bench/1";

/// One CSV row. `p` is the requested rank count; `ranks_used` is what the
/// simulation ran on (arrow decompositions add ranks for later parts).
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub dataset: String,
    pub algorithm: &'static str,
    pub seed: u64,
    pub n: usize,
    pub nnz: usize,
    pub b: Option<usize>,
    pub p: usize,
    pub c: Option<usize>,
    pub k: usize,
    pub ranks_used: Option<usize>,
    pub order: Option<usize>,
    pub max_rank_volume_words: Option<u64>,
    pub total_volume_words: Option<u64>,
    pub critical_path: Option<f64>,
    pub storage_words: Option<u64>,
    pub status: String,
}

#[derive(Clone, Debug)]
struct Cell {
    input: usize,
    seed: u64,
    algorithm: Algorithm,
    width: Option<usize>,
    p: usize,
    c: usize,
    k: usize,
}

fn parse_width(w: &str) -> Result<Option<usize>, CliError> {
    if w == "auto" {
        return Ok(None);
    }
    w.parse().map(Some).map_err(|_| CliError::Usage(format!("bad width `{w}`")))
}

fn cells(args: &BenchArgs) -> Result<Vec<Cell>, CliError> {
    let widths: Vec<Option<usize>> = args.width.iter().map(|w| parse_width(w)).collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for input in 0..args.input.len() {
        for &seed in &args.seed {
            for &algorithm in &args.algorithm {
                for &p in &args.ranks {
                    for &k in &args.features {
                        match algorithm {
                            Algorithm::Arrow => {
                                for &width in &widths {
                                    out.push(Cell { input, seed, algorithm, width, p, c: 0, k });
                                }
                            }
                            Algorithm::OneFiveD => {
                                for &c in &args.repl {
                                    out.push(Cell { input, seed, algorithm, width: None, p, c, k });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

fn run_cell(args: &BenchArgs, cell: &Cell, a: &SparseSymMatrix, row: &mut Row) -> Result<(), CliError> {
    let model = model_of(&args.model)?;
    let n = a.n();
    let x = features(n, cell.k, cell.seed, args.ones);
    match cell.algorithm {
        Algorithm::Arrow => {
            let b = cell.width.unwrap_or_else(|| n.div_ceil(cell.p.max(1))).max(2);
            row.b = Some(b);
            let d = la_decompose(a, b, &strategy_of(args.strategy, cell.seed, n))?;
            let routing = Routing::new(&d)?;
            let opts = SimOptions { unpermute: false, exec: Execution::Sequential };
            let run = decomposition_multiply_sim_with(&d, &routing, &x, model, opts)?;
            row.order = Some(d.order());
            row.ranks_used = Some(run.ledger.ranks());
            row.max_rank_volume_words = Some(run.ledger.max_recv_words());
            row.total_volume_words = Some(run.ledger.total_words());
            row.critical_path = Some(run.ledger.critical_path_time());
            row.storage_words = Some(storage_report(&d, cell.k).total_words);
        }
        Algorithm::OneFiveD => {
            row.c = Some(cell.c);
            let run = baseline_15d_sim(a, &x, cell.p, cell.c, model)?;
            row.ranks_used = Some(run.ledger.ranks());
            row.max_rank_volume_words = Some(run.ledger.max_recv_words());
            row.total_volume_words = Some(run.ledger.total_words());
            row.critical_path = Some(run.ledger.critical_path_time());
            // values and column indices of A, row pointers per rank, replicated X
            let pointers = (cell.p * (run.tile_rows + 1)) as u64;
            row.storage_words = Some(2 * a.nnz() as u64 + pointers + (cell.c * n * cell.k) as u64);
        }
    }
    Ok(())
}

pub fn sweep(args: &BenchArgs) -> Result<Vec<Row>, CliError> {
    let cells = cells(args)?;
    let mut keys: Vec<(usize, u64)> = cells.iter().map(|c| (c.input, c.seed)).collect();
    keys.sort_unstable();
    keys.dedup();
    let inputs: Vec<Result<SparseSymMatrix, String>> = exec::map(Execution::Parallel, &keys, |&(i, seed)| {
        load_input(&args.input[i], seed, args.pattern).map_err(|e| e.to_string())
    });
    let rows = exec::map(Execution::Parallel, &cells, |cell| {
        let idx = keys.binary_search(&(cell.input, cell.seed)).expect("input was loaded");
        let mut row = Row {
            schema: BENCH_SCHEMA,
            tool_version: TOOL_VERSION,
            dataset: args.input[cell.input].clone(),
            algorithm: match cell.algorithm {
                Algorithm::Arrow => "arrow",
                Algorithm::OneFiveD => "1.5d",
            },
            seed: cell.seed,
            n: 0,
            nnz: 0,
            b: None,
            p: cell.p,
            c: None,
            k: cell.k,
            ranks_used: None,
            order: None,
            max_rank_volume_words: None,
            total_volume_words: None,
            critical_path: None,
            storage_words: None,
            status: "ok".into(),
        };
        match &inputs[idx] {
            Ok(a) => {
                row.n = a.n();
                row.nnz = a.nnz();
                if let Err(e) = run_cell(args, cell, a, &mut row) {
                    row.status = format!("failed: {e}");
                }
            }
            Err(e) => row.status = format!("failed: {e}"),
        }
        row
    });
    Ok(rows)
}

pub fn to_csv(rows: &[Row]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    model_of(&args.model)?;
    let text = to_csv(&sweep(args)?)?;
    match &args.out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}
