//! One arrow matrix over `p` simulated ranks.
//!
//! Rank `r` owns rows `r·b .. (r+1)·b` of the row extent: the tiles
//! `B^(0,r)`, `B^(r,0)`, `B^(r,r)` and the matching slice `D^(r)` of the
//! dense operand. Rank 0 owns only `B^(0,0)`.

use super::collective::{broadcast_schedule, reduce_schedule};
use super::ledger::{CommLedger, CostModel};
use crate::decomposition::ArrowMatrix;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::sparse::{DenseMatrix, SparseSymMatrix};

pub const PHASE_BROADCAST: &str = "arrow_broadcast";
pub const PHASE_REDUCE: &str = "arrow_reduce";

/// Rectangular block of a sparse matrix in local CSR coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    rows: usize,
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Tile {
    /// Entries of `m` in rows `r0..r1` and columns `c0..c1`.
    pub fn from_block(m: &SparseSymMatrix, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut offsets = Vec::with_capacity(r1 - r0 + 1);
        let mut indices = Vec::new();
        let mut values = Vec::new();
        offsets.push(0);
        for i in r0..r1 {
            let (cols, vals) = m.row(i);
            let lo = cols.partition_point(|&c| c < c0);
            let hi = cols.partition_point(|&c| c < c1);
            indices.extend(cols[lo..hi].iter().map(|&c| c - c0));
            values.extend_from_slice(&vals[lo..hi]);
            offsets.push(indices.len());
        }
        Self { rows: r1 - r0, cols: c1 - c0, offsets, indices, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `out += self · x`.
    pub fn spmm_add(&self, x: &DenseMatrix, out: &mut DenseMatrix) {
        debug_assert_eq!(x.rows(), self.cols);
        debug_assert_eq!(out.rows(), self.rows);
        for i in 0..self.rows {
            let o = out.row_mut(i);
            for e in self.offsets[i]..self.offsets[i + 1] {
                let v = self.values[e];
                for (a, &xv) in o.iter_mut().zip(x.row(self.indices[e])) {
                    *a += v * xv;
                }
            }
        }
    }
}

/// Tiles owned by one rank.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTiles {
    pub rank: usize,
    pub row_start: usize,
    pub row_end: usize,
    /// `B^(0,r)`; for rank 0 this is `B^(0,0)`.
    pub row_tile: Tile,
    /// `B^(r,0)`, absent on rank 0.
    pub col_tile: Option<Tile>,
    /// `B^(r,r)`, absent on rank 0.
    pub diag_tile: Option<Tile>,
}

impl RankTiles {
    pub fn rows(&self) -> usize {
        self.row_end - self.row_start
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankState {
    pub tiles: RankTiles,
    /// `D^(r)`, the operand rows of this rank.
    pub d: DenseMatrix,
}

/// Cuts an arrow matrix into per-rank tiles. One rank per `b` rows of the
/// row extent, and at least one rank when `n > 0`.
pub fn arrow_tiles(arrow: &ArrowMatrix) -> Result<Vec<RankTiles>> {
    let (n, b) = (arrow.n(), arrow.b());
    if b == 0 {
        return Err(Error::InvalidArgument("arrow width must be positive".into()));
    }
    if let Some(&(i, j)) = arrow.tile_violations().first() {
        return Err(Error::InvalidArgument(format!("entry ({i}, {j}) lies outside the arrow tiles")));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let extent = arrow.row_extent().max(b.min(n));
    let p = extent.div_ceil(b);
    let m = arrow.matrix();
    let head = b.min(n);
    Ok((0..p)
        .map(|r| {
            let (lo, hi) = (r * b, ((r + 1) * b).min(extent));
            if r == 0 {
                RankTiles {
                    rank: 0,
                    row_start: 0,
                    row_end: head,
                    row_tile: Tile::from_block(m, 0, head, 0, head),
                    col_tile: None,
                    diag_tile: None,
                }
            } else {
                RankTiles {
                    rank: r,
                    row_start: lo,
                    row_end: hi,
                    row_tile: Tile::from_block(m, 0, head, lo, hi),
                    col_tile: Some(Tile::from_block(m, lo, hi, 0, head)),
                    diag_tile: Some(Tile::from_block(m, lo, hi, lo, hi)),
                }
            }
        })
        .collect())
}

/// Tiles plus the operand slices taken from `x` (rows in arrow coordinates).
pub fn distribute_arrow(arrow: &ArrowMatrix, x: &DenseMatrix) -> Result<Vec<RankState>> {
    if x.rows() != arrow.n() {
        return Err(Error::DimensionMismatch(format!(
            "operand has {} rows, matrix has dimension {}",
            x.rows(),
            arrow.n()
        )));
    }
    Ok(arrow_tiles(arrow)?
        .into_iter()
        .map(|tiles| {
            let d = slice_rows(x, tiles.row_start, tiles.row_end);
            RankState { tiles, d }
        })
        .collect())
}

pub(crate) fn slice_rows(x: &DenseMatrix, lo: usize, hi: usize) -> DenseMatrix {
    let k = x.cols();
    DenseMatrix::from_vec(hi - lo, k, x.data()[lo * k..hi * k].to_vec()).expect("slice shape")
}

fn add_assign(acc: &mut DenseMatrix, other: &DenseMatrix) {
    for i in 0..acc.rows() {
        for (a, &b) in acc.row_mut(i).iter_mut().zip(other.row(i)) {
            *a += b;
        }
    }
}

/// Runs the arrow multiply on ranks `offset .. offset + tiles.len()` of
/// `ledger` and returns each rank's output slice `C^(r)`.
pub(crate) fn run_arrow(
    tiles: &[&RankTiles],
    d: &[&DenseMatrix],
    ledger: &mut CommLedger,
    offset: usize,
    exec: Execution,
) -> Vec<DenseMatrix> {
    let p = tiles.len();
    if p == 0 {
        return Vec::new();
    }
    let k = d[0].cols();
    let head = d[0];
    let words = (head.rows() * k) as u64;
    for (from, to) in broadcast_schedule(p) {
        ledger.send(PHASE_BROADCAST, offset + from, offset + to, words);
    }
    let mut partials = exec::map_range(exec, p, |r| {
        let mut out = DenseMatrix::zeros(head.rows(), k);
        tiles[r].row_tile.spmm_add(d[r], &mut out);
        out
    });
    for (from, to) in reduce_schedule(p) {
        ledger.send(PHASE_REDUCE, offset + from, offset + to, words);
        let sent = std::mem::replace(&mut partials[from], DenseMatrix::zeros(0, 0));
        add_assign(&mut partials[to], &sent);
    }
    let mut c0 = Some(std::mem::replace(&mut partials[0], DenseMatrix::zeros(0, 0)));
    let rest = exec::map_range(exec, p - 1, |i| {
        let r = i + 1;
        let mut out = DenseMatrix::zeros(tiles[r].rows(), k);
        if let Some(t) = &tiles[r].col_tile {
            t.spmm_add(head, &mut out);
        }
        if let Some(t) = &tiles[r].diag_tile {
            t.spmm_add(d[r], &mut out);
        }
        out
    });
    std::iter::once(c0.take().expect("rank 0 output")).chain(rest).collect()
}

/// Multiplies one arrow matrix by its distributed operand: broadcast `D^(0)`
/// from rank 0, reduce the partial head rows back to rank 0, and compute the
/// remaining row slices locally.
pub fn arrow_multiply_sim(states: &[RankState], model: CostModel) -> (Vec<DenseMatrix>, CommLedger) {
    arrow_multiply_sim_with(states, model, Execution::default())
}

pub fn arrow_multiply_sim_with(
    states: &[RankState],
    model: CostModel,
    exec: Execution,
) -> (Vec<DenseMatrix>, CommLedger) {
    let mut ledger = CommLedger::new(states.len(), model);
    let tiles: Vec<&RankTiles> = states.iter().map(|s| &s.tiles).collect();
    let d: Vec<&DenseMatrix> = states.iter().map(|s| &s.d).collect();
    let c = run_arrow(&tiles, &d, &mut ledger, 0, exec);
    (c, ledger)
}

/// Stacks per-rank output slices into an `n × k` matrix; rows outside the
/// row extent are zero.
pub fn gather_rows(states: &[RankState], c: &[DenseMatrix], n: usize) -> DenseMatrix {
    let k = states.first().map_or(0, |s| s.d.cols());
    let mut y = DenseMatrix::zeros(n, k);
    for (s, part) in states.iter().zip(c) {
        for i in 0..part.rows() {
            y.row_mut(s.tiles.row_start + i).copy_from_slice(part.row(i));
        }
    }
    y
}

/// `2⌈log₂p⌉·(α + bkβ) + (α + bkβ)`.
pub fn arrow_critical_path_bound(p: usize, b: usize, k: usize, model: CostModel) -> f64 {
    let hop = model.time(1, (b * k) as u64);
    (2 * super::collective::ceil_log2(p) as usize + 1) as f64 * hop
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::sparse::{csr_from_coo, dense_spmm_reference, CooEntries};

    fn random_arrow(n: usize, b: usize, seed: u64) -> ArrowMatrix {
        let a = generators::random_symmetric(n, 6, seed);
        let coo = CooEntries::with_triples(
            n,
            a.entries().filter(|&(i, j, _)| i / b == 0 || j / b == 0 || i / b == j / b).collect(),
        );
        ArrowMatrix::new(csr_from_coo(&coo).unwrap(), b).with_row_extent(n).unwrap()
    }

    fn x(n: usize, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, k, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0)
    }

    #[test]
    fn identity_at_unit_width() {
        let arrow = ArrowMatrix::new(SparseSymMatrix::identity(4), 1).with_row_extent(4).unwrap();
        let xs = x(4, 3);
        let states = distribute_arrow(&arrow, &xs).unwrap();
        assert_eq!(states.len(), 4);
        let (c, l) = arrow_multiply_sim(&states, CostModel::new(1.0, 1.0).unwrap());
        assert_eq!(gather_rows(&states, &c, 4), xs);
        assert_eq!(l.phase_messages(PHASE_BROADCAST), 3);
        assert_eq!(l.phase_words(PHASE_BROADCAST), 9);
        assert_eq!(l.phase_messages(PHASE_REDUCE), 3);
        // 2·(2α + 2kβ)
        assert_eq!(l.critical_path_time(), 2.0 * (2.0 + 6.0));
    }

    #[test]
    fn single_rank_has_no_traffic() {
        let arrow = random_arrow(4, 4, 1);
        let xs = x(4, 2);
        let states = distribute_arrow(&arrow, &xs).unwrap();
        assert_eq!(states.len(), 1);
        let (c, l) = arrow_multiply_sim(&states, CostModel::default());
        assert_eq!(l.total_messages(), 0);
        let y = gather_rows(&states, &c, 4);
        assert!(y.rel_inf_error(&dense_spmm_reference(arrow.matrix(), &xs).unwrap()) <= 1e-12);
    }

    #[test]
    fn compacted_rows_spawn_no_rank() {
        let (b, n) = (3, 30);
        let mut coo = CooEntries::new(n);
        coo.push_sym(0, 4, 1.0);
        coo.push_sym(4, 5, 1.0);
        let arrow = ArrowMatrix::new(csr_from_coo(&coo).unwrap(), b);
        assert_eq!(distribute_arrow(&arrow, &x(n, 1)).unwrap().len(), 2);
    }

    #[test]
    fn random_arrow_matches_reference() {
        let arrow = random_arrow(64, 8, 3);
        let xs = x(64, 4);
        let states = distribute_arrow(&arrow, &xs).unwrap();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let (c, l) = arrow_multiply_sim_with(&states, CostModel::default(), exec);
            let y = gather_rows(&states, &c, 64);
            assert!(y.rel_inf_error(&dense_spmm_reference(arrow.matrix(), &xs).unwrap()) <= 1e-12);
            let cp = l.critical_path_time();
            assert!(cp <= arrow_critical_path_bound(8, 8, 4, CostModel::default()));
        }
    }

    #[test]
    fn critical_path_is_two_log_rounds() {
        for p in [2usize, 4, 8, 16] {
            let (b, k) = (2, 3);
            let n = p * b;
            let arrow = random_arrow(n, b, p as u64);
            let states = distribute_arrow(&arrow, &x(n, k)).unwrap();
            assert_eq!(states.len(), p);
            let model = CostModel::new(1.0, 1.0).unwrap();
            let (_, l) = arrow_multiply_sim(&states, model);
            let rounds = 2 * super::super::collective::ceil_log2(p) as u64;
            assert_eq!(l.critical_path().messages, rounds);
            assert_eq!(l.critical_path_time(), model.time(rounds, rounds * (b * k) as u64));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let coo = CooEntries::with_triples(6, vec![(2, 5, 1.0), (5, 2, 1.0)]);
        let bad = ArrowMatrix::new(csr_from_coo(&coo).unwrap(), 2);
        assert!(distribute_arrow(&bad, &x(6, 1)).is_err());
        let ok = random_arrow(8, 2, 0);
        assert!(distribute_arrow(&ok, &x(7, 1)).is_err());
    }
}
