//! Multiply by a whole decomposition, one rank group per part.
//!
//! Part `i` runs on its own contiguous block of ranks. A vertex's operand row
//! is needed by every part where it is a nonzero row; part 0 holds all rows.
//! Rows travel forward from the latest earlier part holding them, partial
//! results travel back along the same routes and are summed on receipt, in
//! decreasing part order. Routes depend only on the permutations, so they are
//! computed once in [`Routing::new`].

use super::arrow::{arrow_tiles, run_arrow, RankTiles};
use super::collective::ceil_log2;
use super::ledger::{CommLedger, CostModel};
use crate::decomposition::ArrowDecomposition;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::sparse::{apply_row_permutation, DenseMatrix};

pub const PHASE_FORWARD: &str = "forward";
pub const PHASE_REVERSE: &str = "reverse";
pub const PHASE_UNPERMUTE: &str = "unpermute";

/// Rows moving between one pair of ranks: `(source position, target position)`.
#[derive(Clone, Debug, PartialEq)]
struct Batch {
    src_part: usize,
    src_rank: usize,
    dst_rank: usize,
    rows: Vec<(usize, usize)>,
}

/// Precomputed rank layout and row routes of a decomposition.
#[derive(Clone, Debug)]
pub struct Routing {
    b: usize,
    offsets: Vec<usize>,
    tiles: Vec<Vec<RankTiles>>,
    /// Batches into part `j`, in send order.
    forward: Vec<Vec<Batch>>,
    unpermute: Vec<Batch>,
}

/// Sorts batches so all even-indexed source ranks send before odd ones.
fn two_phase(batches: &mut [Batch], local: impl Fn(&Batch) -> usize) {
    batches.sort_by_key(|m| (m.src_part, local(m) % 2, m.src_rank, m.dst_rank));
}

fn group(mut routes: Vec<(usize, usize, usize, usize, usize)>) -> Vec<Batch> {
    // (src_part, src_rank, dst_rank, src_pos, dst_pos)
    routes.sort_unstable_by_key(|r| (r.0, r.1, r.2, r.4));
    let mut out: Vec<Batch> = Vec::new();
    for (sp, sr, dr, spos, dpos) in routes {
        match out.last_mut() {
            Some(m) if m.src_part == sp && m.src_rank == sr && m.dst_rank == dr => m.rows.push((spos, dpos)),
            _ => out.push(Batch { src_part: sp, src_rank: sr, dst_rank: dr, rows: vec![(spos, dpos)] }),
        }
    }
    out
}

impl Routing {
    pub fn new(d: &ArrowDecomposition) -> Result<Self> {
        let (n, b) = (d.n(), d.b());
        let parts = d.parts();
        let tiles: Vec<Vec<RankTiles>> = parts.iter().map(|p| arrow_tiles(&p.arrow)).collect::<Result<_>>()?;
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        offsets.push(0);
        for t in &tiles {
            offsets.push(offsets.last().unwrap() + t.len());
        }
        let rank_of = |part: usize, pos: usize| offsets[part] + pos / b;

        let mut last_holder = vec![0usize; n];
        let mut forward = vec![Vec::new(); parts.len()];
        for j in 1..parts.len() {
            let pj = &parts[j];
            let holders: Vec<usize> =
                (0..n).filter(|&q| pj.arrow.matrix().degree(q) > 0).map(|q| pj.arrangement.vertex_at(q)).collect();
            let routes = holders
                .iter()
                .map(|&v| {
                    let s = last_holder[v];
                    let spos = parts[s].arrangement.position(v);
                    let dpos = pj.arrangement.position(v);
                    (s, rank_of(s, spos), rank_of(j, dpos), spos, dpos)
                })
                .collect();
            let mut batches = group(routes);
            two_phase(&mut batches, |m| m.src_rank - offsets[m.src_part]);
            forward[j] = batches;
            for &v in &holders {
                last_holder[v] = j;
            }
        }

        let mut unpermute = Vec::new();
        if let Some(p0) = parts.first() {
            let routes = (0..n)
                .map(|q| {
                    let v = p0.arrangement.vertex_at(q);
                    (0, q / b, v / b, q, v)
                })
                .filter(|r| r.1 != r.2)
                .collect();
            unpermute = group(routes);
            two_phase(&mut unpermute, |m| m.src_rank);
        }
        Ok(Self { b, offsets, tiles, forward, unpermute })
    }

    pub fn ranks(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn ranks_per_part(&self) -> Vec<usize> {
        self.tiles.iter().map(Vec::len).collect()
    }

    /// Rounds of the one-time destination sort over all ranks, reported
    /// rather than simulated: `⌈log₂p⌉(⌈log₂p⌉+1)/2`.
    pub fn setup_rounds(&self) -> u64 {
        let l = ceil_log2(self.ranks()) as u64;
        l * (l + 1) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SimOptions {
    /// Return rows in original vertex order, paying for the extra messages.
    pub unpermute: bool,
    pub exec: Execution,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { unpermute: true, exec: Execution::default() }
    }
}

#[derive(Clone, Debug)]
pub struct DecompositionRun {
    /// `A·X` in original order, or `P_π₀ᵀ·A·X` (part-0 order) when not
    /// un-permuted.
    pub y: DenseMatrix,
    pub unpermuted: bool,
    pub ledger: CommLedger,
    pub ranks_per_part: Vec<usize>,
    /// Words sent into each part during the forward phase (entry 0 is 0).
    pub forward_words: Vec<u64>,
    /// Words sent out of each part during the reverse phase.
    pub reverse_words: Vec<u64>,
    pub setup_rounds: u64,
}

pub fn decomposition_multiply_sim(
    d: &ArrowDecomposition,
    x: &DenseMatrix,
    model: CostModel,
) -> Result<DecompositionRun> {
    let routing = Routing::new(d)?;
    decomposition_multiply_sim_with(d, &routing, x, model, SimOptions::default())
}

pub fn decomposition_multiply_sim_with(
    d: &ArrowDecomposition,
    routing: &Routing,
    x: &DenseMatrix,
    model: CostModel,
    opts: SimOptions,
) -> Result<DecompositionRun> {
    let n = d.n();
    if x.rows() != n {
        return Err(Error::DimensionMismatch(format!("operand has {} rows, decomposition has n = {n}", x.rows())));
    }
    if routing.tiles.len() != d.order() {
        return Err(Error::DimensionMismatch("routing was built for another decomposition".into()));
    }
    let k = x.cols();
    let parts = d.parts();
    let b = routing.b;
    let mut ledger = CommLedger::new(routing.ranks(), model);
    let rows_k = |rows: usize| (rows * k) as u64;

    if parts.is_empty() {
        return Ok(DecompositionRun {
            y: DenseMatrix::zeros(n, k),
            unpermuted: opts.unpermute,
            ledger,
            ranks_per_part: Vec::new(),
            forward_words: Vec::new(),
            reverse_words: Vec::new(),
            setup_rounds: 0,
        });
    }

    // operand rows of each part, in that part's coordinates
    let mut xp: Vec<DenseMatrix> = Vec::with_capacity(parts.len());
    xp.push(apply_row_permutation(x, &parts[0].arrangement)?);
    let mut forward_words = vec![0u64; parts.len()];
    for (words, batches) in forward_words.iter_mut().zip(&routing.forward).skip(1) {
        let mut xj = DenseMatrix::zeros(n, k);
        for batch in batches {
            ledger.send(PHASE_FORWARD, batch.src_rank, batch.dst_rank, rows_k(batch.rows.len()));
            *words += rows_k(batch.rows.len());
            for &(spos, dpos) in &batch.rows {
                xj.row_mut(dpos).copy_from_slice(xp[batch.src_part].row(spos));
            }
        }
        xp.push(xj);
    }

    let mut yp: Vec<DenseMatrix> = Vec::with_capacity(parts.len());
    for (i, tiles) in routing.tiles.iter().enumerate() {
        let slices: Vec<DenseMatrix> =
            tiles.iter().map(|t| super::arrow::slice_rows(&xp[i], t.row_start, t.row_end)).collect();
        let tref: Vec<&RankTiles> = tiles.iter().collect();
        let dref: Vec<&DenseMatrix> = slices.iter().collect();
        let c = run_arrow(&tref, &dref, &mut ledger, routing.offsets[i], opts.exec);
        let mut y = DenseMatrix::zeros(n, k);
        for (t, ci) in tiles.iter().zip(&c) {
            for r in 0..ci.rows() {
                y.row_mut(t.row_start + r).copy_from_slice(ci.row(r));
            }
        }
        yp.push(y);
    }

    let mut reverse_words = vec![0u64; parts.len()];
    for i in (1..parts.len()).rev() {
        let (lower, upper) = yp.split_at_mut(i);
        let yi = &upper[0];
        let mut batches: Vec<&Batch> = routing.forward[i].iter().collect();
        // mirrored routes: part i's ranks send, even local ranks first
        batches.sort_by_key(|m| {
            let local = m.dst_rank - routing.offsets[i];
            (local % 2, m.dst_rank, m.src_part, m.src_rank)
        });
        for batch in batches {
            ledger.send(PHASE_REVERSE, batch.dst_rank, batch.src_rank, rows_k(batch.rows.len()));
            reverse_words[i] += rows_k(batch.rows.len());
            let target = &mut lower[batch.src_part];
            for &(spos, dpos) in &batch.rows {
                for (a, &v) in target.row_mut(spos).iter_mut().zip(yi.row(dpos)) {
                    *a += v;
                }
            }
        }
    }

    let y0 = yp.swap_remove(0);
    let y = if opts.unpermute {
        for batch in &routing.unpermute {
            ledger.send(PHASE_UNPERMUTE, batch.src_rank, batch.dst_rank, rows_k(batch.rows.len()));
        }
        let mut y = DenseMatrix::zeros(n, k);
        for q in 0..n {
            y.row_mut(parts[0].arrangement.vertex_at(q)).copy_from_slice(y0.row(q));
        }
        y
    } else {
        y0
    };
    debug_assert!(b > 0);
    Ok(DecompositionRun {
        y,
        unpermuted: opts.unpermute,
        ledger,
        ranks_per_part: routing.ranks_per_part(),
        forward_words,
        reverse_words,
        setup_rounds: routing.setup_rounds(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{la_decompose, Strategy};
    use crate::generators;
    use crate::sparse::dense_spmm_reference;

    fn x(n: usize, k: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, k, |i, j| (((i * 31 + j * 17) % 23) as f64) / 7.0 - 1.0)
    }

    #[test]
    fn star_degree_vector() {
        let a = generators::star(8);
        let d = la_decompose(&a, 2, &Strategy::RandomForest { seed: 0 }).unwrap();
        assert_eq!(d.order(), 1);
        let ones = DenseMatrix::from_fn(9, 1, |_, _| 1.0);
        let run = decomposition_multiply_sim(&d, &ones, CostModel::default()).unwrap();
        let expect: Vec<f64> = std::iter::once(8.0).chain(std::iter::repeat_n(1.0, 8)).collect();
        assert_eq!(run.y.data(), &expect[..]);
        assert_eq!(run.ledger.phase_words(PHASE_FORWARD), 0);
    }

    #[test]
    fn random_tree_forward_volume() {
        let a = generators::random_tree(512, 5);
        let d = la_decompose(&a, 16, &Strategy::RandomForest { seed: 5 }).unwrap();
        assert!(d.order() >= 2, "order {}", d.order());
        let k = 8;
        let xs = x(512, k);
        let run = decomposition_multiply_sim(&d, &xs, CostModel::default()).unwrap();
        let reference = dense_spmm_reference(&a, &xs).unwrap();
        assert!(run.y.rel_inf_error(&reference) <= 1e-12);
        assert_eq!(run.forward_words[1], (k * d.parts()[1].arrow.nnz_rows()) as u64);
        assert_eq!(run.reverse_words, run.forward_words);
        let s = run.ledger.per_rank();
        assert_eq!(s.iter().map(|r| r.sent_words).sum::<u64>(), s.iter().map(|r| r.recv_words).sum::<u64>());
    }

    #[test]
    fn permuted_output_and_modes() {
        let a = generators::random_symmetric(300, 5, 9);
        let d = la_decompose(&a, 8, &Strategy::SeparatorTree { seed: 9 }).unwrap();
        let routing = Routing::new(&d).unwrap();
        let xs = x(300, 3);
        let reference = dense_spmm_reference(&a, &xs).unwrap();
        let mut outs = Vec::new();
        for exec in [Execution::Sequential, Execution::Parallel] {
            let run = decomposition_multiply_sim_with(
                &d,
                &routing,
                &xs,
                CostModel::default(),
                SimOptions { unpermute: false, exec },
            )
            .unwrap();
            let expect = apply_row_permutation(&reference, &d.parts()[0].arrangement).unwrap();
            assert!(run.y.rel_inf_error(&expect) <= 1e-12);
            assert_eq!(run.ledger.phase_messages(PHASE_UNPERMUTE), 0);
            outs.push(run.y);
        }
        assert_eq!(outs[0], outs[1]);
    }

    #[test]
    fn empty_decomposition_and_mismatch() {
        let d = la_decompose(&crate::sparse::SparseSymMatrix::empty(4), 2, &Strategy::RandomForest { seed: 0 })
            .unwrap();
        let run = decomposition_multiply_sim(&d, &x(4, 2), CostModel::default()).unwrap();
        assert_eq!(run.y, DenseMatrix::zeros(4, 2));
        assert!(decomposition_multiply_sim(&d, &x(5, 2), CostModel::default()).is_err());
    }
}
