//! 1.5D A-stationary baseline on a `(p/c) × c` grid.
//!
//! Rank `(i, j)` is `i·c + j`. It owns the block of `A` in row tile `i`
//! (`⌈nc/p⌉` rows, the last tile may be short) and column block `j`, which
//! spans `p/c²` consecutive row tiles of `X`. Tile `q` of `X` starts on grid
//! row `q`. In round `t` the tile `q = j·p/c² + t` is broadcast down grid
//! column `j` from rank `(q, j)`. The `c` partial results of each row tile
//! are then all-reduced across the grid row as a reduce to `(i, 0)` followed
//! by a broadcast.

use super::collective::{broadcast_schedule, reduce_schedule};
use super::ledger::{CommLedger, CostModel};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::sparse::{DenseMatrix, SparseSymMatrix};

pub const PHASE_X_BROADCAST: &str = "x_broadcast";
pub const PHASE_Y_REDUCE: &str = "y_reduce";
pub const PHASE_Y_BROADCAST: &str = "y_broadcast";

#[derive(Clone, Debug)]
pub struct BaselineRun {
    pub y: DenseMatrix,
    pub ledger: CommLedger,
    pub grid_rows: usize,
    pub tile_rows: usize,
}

pub fn check_grid(p: usize, c: usize) -> Result<()> {
    if p == 0 || c == 0 || !p.is_multiple_of(c * c) {
        return Err(Error::InvalidArgument(format!(
            "1.5D grid needs p >= 1, c >= 1 and c² dividing p (p = {p}, c = {c})"
        )));
    }
    Ok(())
}

pub fn baseline_15d_sim(
    a: &SparseSymMatrix,
    x: &DenseMatrix,
    p: usize,
    c: usize,
    model: CostModel,
) -> Result<BaselineRun> {
    baseline_15d_sim_with(a, x, p, c, model, Execution::default())
}

pub fn baseline_15d_sim_with(
    a: &SparseSymMatrix,
    x: &DenseMatrix,
    p: usize,
    c: usize,
    model: CostModel,
    exec: Execution,
) -> Result<BaselineRun> {
    check_grid(p, c)?;
    let n = a.n();
    if x.rows() != n {
        return Err(Error::DimensionMismatch(format!("operand has {} rows, matrix has dimension {n}", x.rows())));
    }
    let k = x.cols();
    let q = p / c;
    let per_col = q / c;
    let tile = n.div_ceil(q).max(1);
    let tile_range = |s: usize| ((s * tile).min(n), ((s + 1) * tile).min(n));
    let rank = |i: usize, j: usize| i * c + j;
    let mut ledger = CommLedger::new(p, model);

    for j in 0..c {
        for t in 0..per_col {
            let s = j * per_col + t;
            let (lo, hi) = tile_range(s);
            let words = ((hi - lo) * k) as u64;
            for (from, to) in broadcast_schedule(q) {
                let (gf, gt) = ((from + s) % q, (to + s) % q);
                ledger.send(PHASE_X_BROADCAST, rank(gf, j), rank(gt, j), words);
            }
        }
    }

    let mut partials = exec::map_range(exec, p, |r| {
        let (i, j) = (r / c, r % c);
        let (lo, hi) = tile_range(i);
        let (c0, _) = tile_range(j * per_col);
        let (_, c1) = tile_range((j + 1) * per_col - 1);
        let mut out = DenseMatrix::zeros(hi - lo, k);
        for row in lo..hi {
            let (cols, vals) = a.row(row);
            let o = out.row_mut(row - lo);
            let from = cols.partition_point(|&col| col < c0);
            let to = cols.partition_point(|&col| col < c1);
            for e in from..to {
                for (acc, &xv) in o.iter_mut().zip(x.row(cols[e])) {
                    *acc += vals[e] * xv;
                }
            }
        }
        out
    });

    let mut y = DenseMatrix::zeros(n, k);
    for i in 0..q {
        let (lo, hi) = tile_range(i);
        let words = ((hi - lo) * k) as u64;
        for (from, to) in reduce_schedule(c) {
            ledger.send(PHASE_Y_REDUCE, rank(i, from), rank(i, to), words);
            let sent = std::mem::replace(&mut partials[rank(i, from)], DenseMatrix::zeros(0, 0));
            let acc = &mut partials[rank(i, to)];
            for r in 0..sent.rows() {
                for (a, &b) in acc.row_mut(r).iter_mut().zip(sent.row(r)) {
                    *a += b;
                }
            }
        }
        for (from, to) in broadcast_schedule(c) {
            ledger.send(PHASE_Y_BROADCAST, rank(i, from), rank(i, to), words);
        }
        let root = &partials[rank(i, 0)];
        for r in 0..root.rows() {
            y.row_mut(lo + r).copy_from_slice(root.row(r));
        }
    }
    Ok(BaselineRun { y, ledger, grid_rows: q, tile_rows: tile })
}

/// Words of `X` held across all ranks when it is replicated `c` times.
pub fn baseline_dense_words(n: usize, k: usize, c: usize) -> u64 {
    (c * n * k) as u64
}
