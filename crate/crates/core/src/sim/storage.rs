//! Per-rank storage of a distributed decomposition, in 64-bit words.
//!
//! Rank 0 of a part stores `B^(0,0)` as CSR. Rank `r > 0` stores its block
//! row `[B^(r,0) B^(r,r)]` as one CSR plus the values of `B^(0,r)`; by
//! symmetry `B^(0,r)` has the transposed pattern of `B^(r,0)`, so its indices
//! are shared. Every stored entry therefore costs one value word. Dense words
//! are the operand slices `D^(r)`.

use serde::{Deserialize, Serialize};

use super::baseline::baseline_dense_words;
use crate::decomposition::{compaction_factors, ArrowDecomposition};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankStorage {
    pub part: usize,
    pub rank: usize,
    pub rows: usize,
    pub value_words: u64,
    pub index_words: u64,
    pub dense_words: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StorageReport {
    pub n: usize,
    pub nnz: usize,
    pub k: usize,
    pub per_rank: Vec<RankStorage>,
    pub value_words: u64,
    pub index_words: u64,
    pub dense_words: u64,
    pub total_words: u64,
    /// `2·nnz + 2·n·k + 4·n`.
    pub bound_words: u64,
    pub within_bound: bool,
    pub dense_within_2nk: bool,
    pub min_compaction_factor: Option<f64>,
}

impl StorageReport {
    /// `c·n·k` for the 1.5D baseline divided by this decomposition's dense words.
    pub fn baseline_ratio(&self, c: usize) -> f64 {
        baseline_dense_words(self.n, self.k, c) as f64 / self.dense_words as f64
    }
}

pub fn storage_report(d: &ArrowDecomposition, k: usize) -> StorageReport {
    let (n, b) = (d.n(), d.b());
    let mut per_rank = Vec::new();
    let mut offset = 0;
    for (pi, part) in d.parts().iter().enumerate() {
        let arrow = &part.arrow;
        let extent = arrow.row_extent().max(b.min(n));
        let p = extent.div_ceil(b);
        let mut values = vec![0u64; p];
        let mut indexed = vec![0u64; p];
        for (i, j, _) in arrow.matrix().entries() {
            let (ti, tj) = (i / b, j / b);
            if ti == 0 {
                values[tj] += 1;
                if tj == 0 {
                    indexed[0] += 1;
                }
            } else {
                values[ti] += 1;
                indexed[ti] += 1;
            }
        }
        for r in 0..p {
            let rows = ((r + 1) * b).min(extent) - r * b;
            per_rank.push(RankStorage {
                part: pi,
                rank: offset + r,
                rows,
                value_words: values[r],
                index_words: indexed[r] + rows as u64 + 1,
                dense_words: (rows * k) as u64,
            });
        }
        offset += p;
    }
    let value_words = per_rank.iter().map(|r| r.value_words).sum();
    let index_words = per_rank.iter().map(|r| r.index_words).sum();
    let dense_words: u64 = per_rank.iter().map(|r| r.dense_words).sum();
    let total_words = value_words + index_words + dense_words;
    let nnz = d.nnz();
    let bound_words = (2 * nnz + 2 * n * k + 4 * n) as u64;
    StorageReport {
        n,
        nnz,
        k,
        per_rank,
        value_words,
        index_words,
        dense_words,
        total_words,
        bound_words,
        within_bound: total_words <= bound_words,
        dense_within_2nk: dense_words <= (2 * n * k) as u64,
        min_compaction_factor: compaction_factors(d).min_ratio(),
    }
}
