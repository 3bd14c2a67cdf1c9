//! Arrow matrix decompositions.
//!
//! [`la_decompose`] repeatedly prunes the `b` highest-degree vertices into the
//! head of an arrangement, lays out the rest with a linear-arrangement
//! strategy, and keeps every entry that falls in the head row/column tiles or
//! in a diagonal `b × b` tile. Whatever is left is decomposed again until no
//! entries remain, so the parts partition the input exactly:
//!
//! ```text
//! A = Σ_i P_i B_i P_iᵀ
//! ```
//!
//! Parts after the first have their non-empty tile rows moved to the top, so
//! the number of simulated ranks follows the number of non-empty rows.

mod io;

pub use io::{load_decomposition, save_decomposition, DecompositionMeta, PartMeta, META_SCHEMA};

use serde::{Deserialize, Serialize};

use crate::arrangement::{
    arrangement_cost, random_forest_arrangement, random_spanning_forest, separator_la, CentroidOracle,
};
use crate::error::{Error, Result};
use crate::sparse::{
    csr_from_coo, permute_symmetric, CooEntries, LinearArrangement, SparseSymMatrix,
};

/// One arrow matrix `B_i`, stored in its permuted coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ArrowMatrix {
    b: usize,
    matrix: SparseSymMatrix,
    nnz_rows: usize,
    row_extent: usize,
}

impl ArrowMatrix {
    /// Wraps a matrix without checking its shape; see [`verify_arrow_width`].
    ///
    /// The row extent (rows that get a rank) is the end of the last tile row
    /// holding an entry.
    pub fn new(matrix: SparseSymMatrix, b: usize) -> Self {
        let n = matrix.n();
        let nnz_rows = matrix.nonzero_rows();
        let row_extent = match (0..n).rev().find(|&i| matrix.degree(i) > 0) {
            _ if b == 0 => n,
            Some(last) => ((last / b + 1) * b).min(n),
            None => 0,
        };
        Self { b, matrix, nnz_rows, row_extent }
    }

    /// Overrides the row extent, e.g. to give every row a rank.
    pub fn with_row_extent(mut self, row_extent: usize) -> Result<Self> {
        let natural = ArrowMatrix::new(self.matrix.clone(), self.b).row_extent;
        if row_extent < natural || row_extent > self.n() {
            return Err(Error::InvalidArgument(format!(
                "row extent {row_extent} outside [{natural}, {}]",
                self.n()
            )));
        }
        self.row_extent = row_extent;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn matrix(&self) -> &SparseSymMatrix {
        &self.matrix
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Rows holding at least one entry.
    pub fn nnz_rows(&self) -> usize {
        self.nnz_rows
    }

    /// Leading rows that are distributed over ranks; a multiple of `b`
    /// except for a short final tile.
    pub fn row_extent(&self) -> usize {
        self.row_extent
    }

    /// Entries outside the head tiles `(0, j)`, `(i, 0)` and the diagonal
    /// tiles `(i, i)`.
    pub fn tile_violations(&self) -> Vec<(usize, usize)> {
        if self.b == 0 {
            return self.matrix.entries().filter(|&(i, j, _)| i != j).map(|(i, j, _)| (i, j)).collect();
        }
        let b = self.b;
        self.matrix
            .entries()
            .filter(|&(i, j, _)| !(i / b == 0 || j / b == 0 || i / b == j / b))
            .map(|(i, j, _)| (i, j))
            .collect()
    }
}

/// Result of [`verify_arrow_width`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowWidthReport {
    pub ok: bool,
    pub violations: Vec<(usize, usize)>,
}

/// Checks arrow width `b` (0-indexed): every entry `(i, j)` must satisfy
/// `i < b`, `j < b` or `|i − j| <= b`.
pub fn verify_arrow_width(arrow: &ArrowMatrix) -> ArrowWidthReport {
    let b = arrow.b;
    let violations: Vec<(usize, usize)> = arrow
        .matrix
        .entries()
        .filter(|&(i, j, _)| !(i < b || j < b || i.abs_diff(j) <= b))
        .map(|(i, j, _)| (i, j))
        .collect();
    ArrowWidthReport { ok: violations.is_empty(), violations }
}

/// How the non-head vertices of each iteration are arranged.
#[derive(Clone, Debug, PartialEq)]
pub enum Strategy {
    /// Smallest-first order of a random minimum spanning forest.
    RandomForest { seed: u64 },
    /// Centroid separator recursion over a random spanning forest.
    SeparatorTree { seed: u64 },
    /// Caller-supplied arrangements; iteration `i` uses entry `min(i, len-1)`.
    Provided(Vec<LinearArrangement>),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::RandomForest { .. } => "random-forest",
            Strategy::SeparatorTree { .. } => "separator-tree",
            Strategy::Provided(_) => "provided",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Strategy::RandomForest { seed } | Strategy::SeparatorTree { seed } => Some(*seed),
            Strategy::Provided(_) => None,
        }
    }

    /// Arrangement of all vertices of `residual` for iteration `iteration`.
    fn arrange(&self, residual: &SparseSymMatrix, iteration: usize) -> Result<LinearArrangement> {
        let iteration_seed = |seed: u64| seed.wrapping_add((iteration as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        match self {
            Strategy::RandomForest { seed } => Ok(random_forest_arrangement(residual, iteration_seed(*seed))),
            Strategy::SeparatorTree { seed } => {
                let forest = random_spanning_forest(residual, iteration_seed(*seed));
                separator_la(&forest.to_matrix(), &CentroidOracle)
            }
            Strategy::Provided(list) => {
                let pi = list
                    .get(iteration.min(list.len().saturating_sub(1)))
                    .ok_or_else(|| Error::InvalidArgument("no arrangement provided".into()))?;
                if pi.len() != residual.n() {
                    return Err(Error::DimensionMismatch(format!(
                        "provided arrangement has length {}, graph has {} vertices",
                        pi.len(),
                        residual.n()
                    )));
                }
                Ok(pi.clone())
            }
        }
    }
}

/// One `(π_i, B_i)` pair plus the arrangement cost of its residual graph.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionPart {
    pub arrangement: LinearArrangement,
    pub arrow: ArrowMatrix,
    /// `λ` of the non-head arrangement on the pruned graph, when known.
    pub lambda: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrowDecomposition {
    n: usize,
    b: usize,
    strategy: String,
    seed: Option<u64>,
    parts: Vec<DecompositionPart>,
}

impl ArrowDecomposition {
    pub fn from_parts(
        n: usize,
        b: usize,
        strategy: impl Into<String>,
        seed: Option<u64>,
        parts: Vec<DecompositionPart>,
    ) -> Result<Self> {
        for (i, p) in parts.iter().enumerate() {
            if p.arrangement.len() != n || p.arrow.n() != n || p.arrow.b() != b {
                return Err(Error::DimensionMismatch(format!("part {i} does not match n={n}, b={b}")));
            }
        }
        Ok(Self { n, b, strategy: strategy.into(), seed, parts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of parts.
    pub fn order(&self) -> usize {
        self.parts.len()
    }

    pub fn parts(&self) -> &[DecompositionPart] {
        &self.parts
    }

    pub fn strategy(&self) -> &str {
        &self.strategy
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn nnz(&self) -> usize {
        self.parts.iter().map(|p| p.arrow.nnz()).sum()
    }

    pub fn part_nnz(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.arrow.nnz()).collect()
    }

    pub fn part_nnz_rows(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.arrow.nnz_rows()).collect()
    }

    pub fn lambdas(&self) -> Vec<Option<u64>> {
        self.parts.iter().map(|p| p.lambda).collect()
    }
}

/// Output of [`prune_top_degree`].
#[derive(Clone, Debug, PartialEq)]
pub struct Pruned {
    /// Pruned vertices, by decreasing degree then id.
    pub head: Vec<usize>,
    /// Induced subgraph on the remaining vertices, same dimension as the
    /// input; pruned vertices are isolated.
    pub residual: SparseSymMatrix,
}

/// Picks the `b` highest-degree vertices (ties: smallest id) and removes them.
pub fn prune_top_degree(a: &SparseSymMatrix, b: usize) -> Result<Pruned> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!("arrow width must be >= 2, got {b}")));
    }
    let n = a.n();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_unstable_by_key(|&v| (std::cmp::Reverse(a.degree(v)), v));
    by_degree.truncate(b.min(n));
    let mut is_head = vec![false; n];
    for &v in &by_degree {
        is_head[v] = true;
    }
    let mut coo = CooEntries::new(n);
    coo.triples.extend(a.entries().filter(|&(i, j, _)| !is_head[i] && !is_head[j]));
    let residual = csr_from_coo(&coo)?;
    Ok(Pruned { head: by_degree, residual })
}

/// Splits a permuted matrix into its arrow part and a remainder.
///
/// Entry `(i, j)` is kept when it lies in tile row 0, tile column 0, or a
/// diagonal tile. The remainder is returned in original vertex ids, mapped
/// back through `arrangement`.
pub fn extract_arrow(
    permuted: &SparseSymMatrix,
    b: usize,
    arrangement: &LinearArrangement,
) -> Result<(ArrowMatrix, CooEntries)> {
    if b == 0 {
        return Err(Error::InvalidArgument("arrow width must be positive".into()));
    }
    if arrangement.len() != permuted.n() {
        return Err(Error::DimensionMismatch("arrangement length differs from matrix".into()));
    }
    let n = permuted.n();
    let mut kept = CooEntries::new(n);
    let mut rest = CooEntries::new(n);
    for (i, j, v) in permuted.entries() {
        if i / b == 0 || j / b == 0 || i / b == j / b {
            kept.push(i, j, v);
        } else {
            rest.push(arrangement.vertex_at(i), arrangement.vertex_at(j), v);
        }
    }
    Ok((ArrowMatrix::new(csr_from_coo(&kept)?, b), rest))
}

/// Moves tile rows that hold entries to the top, keeping tile 0 first and the
/// relative order of the rest. Returns the position relabeling and the
/// relabeled arrow.
fn compact_tiles(arrow: &ArrowMatrix) -> Result<(LinearArrangement, ArrowMatrix)> {
    let (n, b) = (arrow.n(), arrow.b);
    let tiles = n.div_ceil(b);
    let mut busy = vec![false; tiles];
    if tiles > 0 {
        busy[0] = true;
    }
    for i in 0..n {
        if arrow.matrix.degree(i) > 0 {
            busy[i / b] = true;
        }
    }
    let order: Vec<usize> = (0..tiles)
        .filter(|&t| busy[t])
        .chain((0..tiles).filter(|&t| !busy[t]))
        .flat_map(|t| t * b..((t + 1) * b).min(n))
        .collect();
    let relabel = LinearArrangement::from_order(order)?;
    let matrix = permute_symmetric(&arrow.matrix, &relabel)?;
    Ok((relabel, ArrowMatrix::new(matrix, b)))
}

/// Decomposes a symmetric matrix into arrow matrices of width `b`.
///
/// Every iteration prunes the `b` highest-degree vertices to the front of
/// `π_i`, appends the strategy's arrangement of the remaining vertices that
/// still have edges, then the isolated ones by id, and extracts the arrow
/// part. The loop ends when nothing remains; it always progresses because the
/// highest-degree vertex sits in the head and all its entries are captured.
/// Parts after the first are tile-compacted; the first part keeps every row
/// so that its ranks hold the whole input block.
pub fn la_decompose(a: &SparseSymMatrix, b: usize, strategy: &Strategy) -> Result<ArrowDecomposition> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!("arrow width must be >= 2, got {b}")));
    }
    if !a.is_symmetric() {
        return Err(Error::InvalidArgument("decomposition requires a symmetric matrix".into()));
    }
    let n = a.n();
    let mut current = a.clone();
    let mut parts = Vec::new();
    while current.nnz() > 0 {
        let iteration = parts.len();
        let Pruned { head, residual } = prune_top_degree(&current, b)?;
        let rest = strategy.arrange(&residual, iteration)?;
        let mut is_head = vec![false; n];
        for &v in &head {
            is_head[v] = true;
        }
        let order: Vec<usize> = head
            .iter()
            .copied()
            .chain(rest.inverse().iter().copied().filter(|&v| !is_head[v] && residual.degree(v) > 0))
            .chain((0..n).filter(|&v| !is_head[v] && residual.degree(v) == 0))
            .collect();
        let mut pi = LinearArrangement::from_order(order)?;
        let lambda = arrangement_cost(&residual, &pi)?;
        let permuted = permute_symmetric(&current, &pi)?;
        let (mut arrow, remainder) = extract_arrow(&permuted, b, &pi)?;
        if iteration == 0 {
            arrow = arrow.with_row_extent(n)?;
        } else {
            let (relabel, compacted) = compact_tiles(&arrow)?;
            pi = pi.then(&relabel)?;
            arrow = compacted;
        }
        debug_assert!(arrow.nnz() > 0);
        parts.push(DecompositionPart { arrangement: pi, arrow, lambda: Some(lambda) });
        current = csr_from_coo(&remainder)?;
    }
    ArrowDecomposition::from_parts(n, b, strategy.name(), strategy.seed(), parts)
}

/// `Σ_i P_i B_i P_iᵀ`.
pub fn reconstruct(d: &ArrowDecomposition) -> SparseSymMatrix {
    let mut coo = CooEntries::new(d.n);
    coo.triples.reserve(d.nnz());
    for part in &d.parts {
        let pi = &part.arrangement;
        coo.triples
            .extend(part.arrow.matrix.entries().map(|(i, j, v)| (pi.vertex_at(i), pi.vertex_at(j), v)));
    }
    csr_from_coo(&coo).expect("part entries are in range")
}

/// True when the un-permuted parts partition the entries of `a` exactly.
pub fn is_exact_partition(d: &ArrowDecomposition, a: &SparseSymMatrix) -> bool {
    d.n == a.n() && d.nnz() == a.nnz() && reconstruct(d) == *a
}

/// Successive nonzero ratios and the predicted compaction factor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactionReport {
    /// `nnz(B_i) / nnz(B_{i+1})`.
    pub ratios: Vec<f64>,
    /// `b·m / max_i λ_i` with `m` the undirected edge count; `None` when no
    /// λ was recorded or every λ is zero.
    pub predicted_x: Option<f64>,
    pub max_lambda: Option<u64>,
    pub edges: usize,
}

impl CompactionReport {
    pub fn min_ratio(&self) -> Option<f64> {
        self.ratios.iter().copied().reduce(f64::min)
    }
}

pub fn compaction_factors(d: &ArrowDecomposition) -> CompactionReport {
    let ratios = d
        .parts
        .windows(2)
        .map(|w| w[0].arrow.nnz() as f64 / w[1].arrow.nnz() as f64)
        .collect();
    let edges: usize = d.parts.iter().map(|p| p.arrow.matrix.edge_count()).sum();
    let max_lambda = d.parts.iter().filter_map(|p| p.lambda).max();
    let predicted_x = match max_lambda {
        Some(l) if l > 0 => Some(d.b as f64 * edges as f64 / l as f64),
        _ => None,
    };
    CompactionReport { ratios, predicted_x, max_lambda, edges }
}

/// First width in `2, 4, 8, …` (capped at `n`) whose decomposition
/// satisfies `b >= multiplier · max_i λ_i / m`.
pub fn choose_width(a: &SparseSymMatrix, strategy: &Strategy, multiplier: f64) -> Result<usize> {
    let n = a.n().max(2);
    let edges = a.edge_count().max(1) as f64;
    let mut b = 2usize;
    loop {
        let d = la_decompose(a, b, strategy)?;
        let lambda = d.parts.iter().filter_map(|p| p.lambda).max().unwrap_or(0) as f64;
        if b as f64 >= multiplier * lambda / edges || b >= n {
            return Ok(b);
        }
        b = (2 * b).min(n);
    }
}
