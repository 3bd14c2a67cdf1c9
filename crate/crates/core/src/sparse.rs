//! Sparse symmetric matrices, dense row-major matrices and permutations.
//!
//! The reference multiply in this module is the correctness oracle for every
//! simulated algorithm, so its accumulation order is fixed: for each output
//! row, stored entries are visited in increasing column order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};

/// Coordinate triples used to build and exchange matrices.
///
/// Duplicates are allowed and are summed by [`csr_from_coo`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CooEntries {
    pub n: usize,
    pub triples: Vec<(usize, usize, f64)>,
}

impl CooEntries {
    pub fn new(n: usize) -> Self {
        Self { n, triples: Vec::new() }
    }

    pub fn with_triples(n: usize, triples: Vec<(usize, usize, f64)>) -> Self {
        Self { n, triples }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        self.triples.push((row, col, value));
    }

    /// Pushes `(row, col)` and, off the diagonal, its mirror `(col, row)`.
    pub fn push_sym(&mut self, row: usize, col: usize, value: f64) {
        self.triples.push((row, col, value));
        if row != col {
            self.triples.push((col, row, value));
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

/// Square sparse matrix in compressed-row form.
///
/// Column indices are strictly increasing within a row and no explicit zeros
/// are stored. Matrices produced by the decomposition and the generators are
/// symmetric; [`csr_from_coo`] does not enforce symmetry, use [`symmetrize`]
/// or check [`SparseSymMatrix::is_symmetric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSymMatrix {
    n: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn empty(n: usize) -> Self {
        Self { n, row_offsets: vec![0; n + 1], col_indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from CSR arrays, validating every structural invariant.
    pub fn from_csr(
        n: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "row_offsets has length {}, expected {}",
                row_offsets.len(),
                n + 1
            )));
        }
        if col_indices.len() != values.len() || row_offsets[n] != col_indices.len() {
            return Err(Error::DimensionMismatch("nnz disagrees between arrays".into()));
        }
        if row_offsets[0] != 0 {
            return Err(Error::InvalidArgument("row_offsets[0] must be 0".into()));
        }
        for i in 0..n {
            let (lo, hi) = (row_offsets[i], row_offsets[i + 1]);
            if lo > hi {
                return Err(Error::InvalidArgument(format!("row_offsets decrease at row {i}")));
            }
            for k in lo..hi {
                let c = col_indices[k];
                if c >= n {
                    return Err(Error::IndexOutOfRange { row: i, col: c, n });
                }
                if k > lo && col_indices[k - 1] >= c {
                    return Err(Error::InvalidArgument(format!(
                        "columns not strictly increasing in row {i}"
                    )));
                }
                if values[k] == 0.0 {
                    return Err(Error::InvalidArgument(format!("explicit zero at ({i}, {c})")));
                }
            }
        }
        Ok(Self { n, row_offsets, col_indices, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[r.clone()], &self.values[r])
    }

    /// Number of stored entries in row `i`, i.e. the vertex degree (a self
    /// loop counts once).
    pub fn degree(&self, i: usize) -> usize {
        self.row_offsets[i + 1] - self.row_offsets[i]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).ok().map(|k| vals[k])
    }

    /// All stored entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    /// Entries with `row <= col`: each undirected edge once, self loops included.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries().filter(|&(i, j, _)| i <= j)
    }

    /// Number of undirected edges (self loops included, each counted once).
    pub fn edge_count(&self) -> usize {
        self.upper_entries().count()
    }

    /// Number of rows holding at least one entry.
    pub fn nonzero_rows(&self) -> usize {
        (0..self.n).filter(|&i| self.degree(i) > 0).count()
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| self.get(j, i) == Some(v))
    }

    pub fn to_coo(&self) -> CooEntries {
        CooEntries { n: self.n, triples: self.entries().collect() }
    }

    /// Same pattern with every value set to 1.0.
    pub fn to_pattern(&self) -> Self {
        Self { values: vec![1.0; self.values.len()], ..self.clone() }
    }
}

/// Builds a CSR matrix from triples. Duplicates are summed, entries that sum
/// to exactly zero are dropped. Symmetry is not enforced.
pub fn csr_from_coo(entries: &CooEntries) -> Result<SparseSymMatrix> {
    let n = entries.n;
    for &(r, c, _) in &entries.triples {
        if r >= n || c >= n {
            return Err(Error::IndexOutOfRange { row: r, col: c, n });
        }
    }
    let mut counts = vec![0usize; n + 1];
    for &(r, _, _) in &entries.triples {
        counts[r + 1] += 1;
    }
    for i in 0..n {
        counts[i + 1] += counts[i];
    }
    // Bucket by row, keeping input order inside each row so duplicate sums are
    // accumulated in input order.
    let mut next = counts.clone();
    let mut bucket = vec![(0usize, 0.0f64); entries.triples.len()];
    for &(r, c, v) in &entries.triples {
        bucket[next[r]] = (c, v);
        next[r] += 1;
    }
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(bucket.len());
    let mut values = Vec::with_capacity(bucket.len());
    row_offsets.push(0);
    for i in 0..n {
        let row = &mut bucket[counts[i]..counts[i + 1]];
        row.sort_by_key(|&(c, _)| c);
        let mut k = 0;
        while k < row.len() {
            let c = row[k].0;
            let mut sum = 0.0;
            while k < row.len() && row[k].0 == c {
                sum += row[k].1;
                k += 1;
            }
            if sum != 0.0 {
                col_indices.push(c);
                values.push(sum);
            }
        }
        row_offsets.push(col_indices.len());
    }
    Ok(SparseSymMatrix { n, row_offsets, col_indices, values })
}

/// Returns `A + Aᵀ`: the pattern is the union of both patterns and the value at
/// `(i, j)` and `(j, i)` is `A(i, j) + A(j, i)`, absent entries counting as
/// zero. Diagonal entries are therefore doubled, as are the values of an
/// already-symmetric input.
pub fn symmetrize(a: &SparseSymMatrix) -> SparseSymMatrix {
    let mut coo = CooEntries::new(a.n);
    coo.triples.reserve(2 * a.nnz());
    for (i, j, v) in a.entries() {
        coo.push(i, j, v);
        coo.push(j, i, v);
    }
    csr_from_coo(&coo).expect("indices come from a valid matrix")
}

/// Bijection between vertices and positions.
///
/// `forward[v]` is the position of vertex `v`; `inverse[p]` is the vertex at
/// position `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearArrangement {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl LinearArrangement {
    pub fn identity(n: usize) -> Self {
        Self { forward: (0..n).collect(), inverse: (0..n).collect() }
    }

    /// Builds an arrangement from the forward map `vertex -> position`.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (v, &p) in forward.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidPermutation(format!("position {p} out of range {n}")));
            }
            if inverse[p] != usize::MAX {
                return Err(Error::InvalidPermutation(format!("position {p} used twice")));
            }
            inverse[p] = v;
        }
        Ok(Self { forward, inverse })
    }

    /// Builds an arrangement from a vertex order: `order[p]` is placed at `p`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let inv = Self::from_forward(order)?;
        Ok(inv.inverted())
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Position of vertex `v`.
    pub fn position(&self, v: usize) -> usize {
        self.forward[v]
    }

    /// Vertex placed at position `p`.
    pub fn vertex_at(&self, p: usize) -> usize {
        self.inverse[p]
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn inverted(&self) -> Self {
        Self { forward: self.inverse.clone(), inverse: self.forward.clone() }
    }

    /// Arrangement that first applies `self`, then `then`: `v -> then(self(v))`.
    pub fn then(&self, then: &LinearArrangement) -> Result<Self> {
        if then.len() != self.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose arrangements of length {} and {}",
                self.len(),
                then.len()
            )));
        }
        Self::from_forward(self.forward.iter().map(|&p| then.forward[p]).collect())
    }
}

/// Computes `P_πᵀ A P_π`: the entry `(u, v)` moves to `(π(u), π(v))`.
pub fn permute_symmetric(a: &SparseSymMatrix, pi: &LinearArrangement) -> Result<SparseSymMatrix> {
    if pi.len() != a.n {
        return Err(Error::DimensionMismatch(format!(
            "arrangement of length {} for matrix of dimension {}",
            pi.len(),
            a.n
        )));
    }
    let n = a.n;
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::with_capacity(a.nnz());
    let mut values = Vec::with_capacity(a.nnz());
    row_offsets.push(0);
    let mut scratch: Vec<(usize, f64)> = Vec::new();
    for p in 0..n {
        let u = pi.vertex_at(p);
        let (cols, vals) = a.row(u);
        scratch.clear();
        scratch.extend(cols.iter().zip(vals).map(|(&c, &v)| (pi.position(c), v)));
        scratch.sort_by_key(|&(c, _)| c);
        for &(c, v) in &scratch {
            col_indices.push(c);
            values.push(v);
        }
        row_offsets.push(col_indices.len());
    }
    Ok(SparseSymMatrix { n, row_offsets, col_indices, values })
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix infinity norm: the largest absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `‖self − reference‖∞ / ‖reference‖∞`, or the absolute norm when the
    /// reference is zero.
    pub fn rel_inf_error(&self, reference: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (reference.rows, reference.cols));
        let diff = (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(reference.row(i)).map(|(a, b)| (a - b).abs()).sum::<f64>()
            })
            .fold(0.0, f64::max);
        let norm = reference.inf_norm();
        if norm == 0.0 {
            diff
        } else {
            diff / norm
        }
    }
}

/// Ground-truth `Y = A·X`, sequential.
pub fn dense_spmm_reference(a: &SparseSymMatrix, x: &DenseMatrix) -> Result<DenseMatrix> {
    dense_spmm_reference_with(a, x, Execution::Sequential)
}

/// [`dense_spmm_reference`] with rows optionally computed in parallel. Each
/// row is accumulated in the same order in both modes, so results are
/// bit-identical.
pub fn dense_spmm_reference_with(
    a: &SparseSymMatrix,
    x: &DenseMatrix,
    exec: Execution,
) -> Result<DenseMatrix> {
    if a.n != x.rows {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} but dense matrix has {} rows",
            a.n, x.rows
        )));
    }
    let k = x.cols;
    let mut y = DenseMatrix::zeros(a.n, k);
    exec::for_each_chunk_mut(exec, &mut y.data, k, |i, out| {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            for (o, &xv) in out.iter_mut().zip(x.row(j)) {
                *o += v * xv;
            }
        }
    });
    Ok(y)
}

/// Computes `P_πᵀ X`: row `v` of the input becomes row `π(v)`.
pub fn apply_row_permutation(x: &DenseMatrix, pi: &LinearArrangement) -> Result<DenseMatrix> {
    if pi.len() != x.rows {
        return Err(Error::DimensionMismatch(format!(
            "arrangement of length {} for {} rows",
            pi.len(),
            x.rows
        )));
    }
    let mut out = DenseMatrix::zeros(x.rows, x.cols);
    for v in 0..x.rows {
        out.row_mut(pi.position(v)).copy_from_slice(x.row(v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn coo(n: usize, t: &[(usize, usize, f64)]) -> CooEntries {
        CooEntries::with_triples(n, t.to_vec())
    }

    fn path(n: usize) -> SparseSymMatrix {
        let mut c = CooEntries::new(n);
        for i in 1..n {
            c.push_sym(i - 1, i, 1.0);
        }
        csr_from_coo(&c).unwrap()
    }

    fn random_symmetric(n: usize, per_row: usize, rng: &mut ChaCha8Rng) -> SparseSymMatrix {
        let mut c = CooEntries::new(n);
        for i in 0..n {
            for _ in 0..per_row {
                let j = rng.gen_range(0..n);
                let v: f64 = rng.gen_range(0.5..2.0);
                c.push_sym(i, j, v);
            }
        }
        csr_from_coo(&c).unwrap()
    }

    fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> LinearArrangement {
        use rand::seq::SliceRandom;
        let mut f: Vec<usize> = (0..n).collect();
        f.shuffle(rng);
        LinearArrangement::from_forward(f).unwrap()
    }

    #[test]
    fn coo_minimal_pair() {
        let a = csr_from_coo(&coo(2, &[(0, 1, 1.0), (1, 0, 1.0)])).unwrap();
        assert_eq!(a.n(), 2);
        assert_eq!(a.nnz(), 2);
        assert!(a.is_symmetric());
    }

    #[test]
    fn coo_sums_duplicates() {
        let a = csr_from_coo(&coo(2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0)])).unwrap();
        assert_eq!(a.get(0, 1), Some(3.0));
        assert_eq!(a.get(1, 0), Some(3.0));
    }

    #[test]
    fn coo_drops_cancellation() {
        let a = csr_from_coo(&coo(2, &[(0, 1, 1.0), (0, 1, -1.0)])).unwrap();
        assert_eq!(a.nnz(), 0);
    }

    #[test]
    fn coo_rejects_out_of_range() {
        assert!(matches!(
            csr_from_coo(&coo(2, &[(0, 2, 1.0)])),
            Err(Error::IndexOutOfRange { row: 0, col: 2, n: 2 })
        ));
    }

    #[test]
    fn from_csr_validates() {
        assert!(SparseSymMatrix::from_csr(2, vec![0, 1, 2], vec![1, 0], vec![1.0, 1.0]).is_ok());
        assert!(SparseSymMatrix::from_csr(2, vec![0, 2, 2], vec![1, 0], vec![1.0, 1.0]).is_err());
        assert!(SparseSymMatrix::from_csr(2, vec![0, 1, 2], vec![1, 0], vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn symmetrize_upper_path() {
        let a = csr_from_coo(&coo(3, &[(0, 1, 1.0), (1, 2, 1.0)])).unwrap();
        let s = symmetrize(&a);
        assert_eq!(s.nnz(), 4);
        assert!(s.is_symmetric());
        assert_eq!(s.get(2, 1), Some(1.0));
    }

    #[test]
    fn symmetrize_doubles_symmetric_input() {
        let a = csr_from_coo(&coo(2, &[(0, 1, 1.5), (1, 0, 1.5), (1, 1, 2.0)])).unwrap();
        let s = symmetrize(&a);
        assert_eq!(s.get(0, 1), Some(3.0));
        assert_eq!(s.get(1, 1), Some(4.0));
        assert_eq!(symmetrize(&SparseSymMatrix::empty(4)), SparseSymMatrix::empty(4));
    }

    #[test]
    fn permute_identity_and_reversal() {
        let p3 = path(3);
        assert_eq!(permute_symmetric(&p3, &LinearArrangement::identity(3)).unwrap(), p3);
        let rev = LinearArrangement::from_forward(vec![2, 1, 0]).unwrap();
        let r = permute_symmetric(&p3, &rev).unwrap();
        assert_eq!(r.get(2, 1), Some(1.0));
        assert_eq!(r.get(1, 0), Some(1.0));
        assert_eq!(r.nnz(), 4);
        assert!(permute_symmetric(&p3, &LinearArrangement::identity(2)).is_err());
    }

    #[test]
    fn reference_identity_and_path() {
        let x = DenseMatrix::from_fn(3, 2, |i, j| (i * 2 + j) as f64 + 0.5);
        let y = dense_spmm_reference(&SparseSymMatrix::identity(3), &x).unwrap();
        assert_eq!(y, x);
        let ones = DenseMatrix::from_fn(3, 1, |_, _| 1.0);
        let y = dense_spmm_reference(&path(3), &ones).unwrap();
        assert_eq!(y.data(), &[1.0, 2.0, 1.0]);
        assert!(dense_spmm_reference(&path(4), &ones).is_err());
    }

    #[test]
    fn reference_matches_dense_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 64;
        let a = random_symmetric(n, 3, &mut rng);
        let x = DenseMatrix::from_fn(n, 4, |_, _| rng.gen_range(-1.0..1.0));
        // independent oracle: materialize A densely and multiply
        let mut dense = vec![0.0; n * n];
        for (i, j, v) in a.entries() {
            dense[i * n + j] = v;
        }
        let mut expect = DenseMatrix::zeros(n, 4);
        for i in 0..n {
            for j in 0..n {
                for c in 0..4 {
                    expect.row_mut(i)[c] += dense[i * n + j] * x.get(j, c);
                }
            }
        }
        let y = dense_spmm_reference(&a, &x).unwrap();
        for (p, q) in y.data().iter().zip(expect.data()) {
            assert!((p - q).abs() <= 1e-12);
        }
        let yp = dense_spmm_reference_with(&a, &x, Execution::Parallel).unwrap();
        assert_eq!(y, yp);
    }

    #[test]
    fn row_permutation_examples() {
        let x = DenseMatrix::from_vec(2, 1, vec![1.0, 2.0]).unwrap();
        assert_eq!(apply_row_permutation(&x, &LinearArrangement::identity(2)).unwrap(), x);
        let swap = LinearArrangement::from_forward(vec![1, 0]).unwrap();
        assert_eq!(apply_row_permutation(&x, &swap).unwrap().data(), &[2.0, 1.0]);
        assert!(apply_row_permutation(&x, &LinearArrangement::identity(3)).is_err());
    }

    #[test]
    fn arrangement_validation() {
        assert!(LinearArrangement::from_forward(vec![0, 0]).is_err());
        assert!(LinearArrangement::from_forward(vec![0, 2]).is_err());
        let a = LinearArrangement::from_order(vec![2, 0, 1]).unwrap();
        assert_eq!(a.position(2), 0);
        assert_eq!(a.vertex_at(2), 1);
    }

    proptest! {
        #[test]
        fn permute_round_trip_preserves_structure(seed in any::<u64>(), n in 1usize..80) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symmetric(n, 2, &mut rng);
            let pi = random_perm(n, &mut rng);
            let b = permute_symmetric(&a, &pi).unwrap();
            prop_assert_eq!(b.nnz(), a.nnz());
            prop_assert!(b.is_symmetric());
            let mut va: Vec<u64> = a.values().iter().map(|v| v.to_bits()).collect();
            let mut vb: Vec<u64> = b.values().iter().map(|v| v.to_bits()).collect();
            va.sort_unstable();
            vb.sort_unstable();
            prop_assert_eq!(va, vb);
            for (u, v, val) in a.entries() {
                prop_assert_eq!(b.get(pi.position(u), pi.position(v)), Some(val));
            }
            let back = permute_symmetric(&b, &pi.inverted()).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn row_permutation_round_trip(seed in any::<u64>(), n in 1usize..50, k in 1usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = DenseMatrix::from_fn(n, k, |_, _| rng.gen());
            let pi = random_perm(n, &mut rng);
            let y = apply_row_permutation(&x, &pi).unwrap();
            prop_assert_eq!(apply_row_permutation(&y, &pi.inverted()).unwrap(), x);
        }

        #[test]
        fn coo_export_round_trip(seed in any::<u64>(), n in 0usize..60) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = if n == 0 { SparseSymMatrix::empty(0) } else { random_symmetric(n, 3, &mut rng) };
            prop_assert_eq!(csr_from_coo(&a.to_coo()).unwrap(), a);
        }

        #[test]
        fn reference_is_linear(seed in any::<u64>(), n in 1usize..256) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_symmetric(n, 3, &mut rng);
            let x = DenseMatrix::from_fn(n, 3, |_, _| rng.gen_range(-1.0..1.0));
            let x2 = DenseMatrix::from_fn(n, 3, |_, _| rng.gen_range(-1.0..1.0));
            let sum = DenseMatrix::from_fn(n, 3, |i, j| x.get(i, j) + x2.get(i, j));
            let lhs = dense_spmm_reference(&a, &sum).unwrap();
            let y1 = dense_spmm_reference(&a, &x).unwrap();
            let y2 = dense_spmm_reference(&a, &x2).unwrap();
            let rhs = DenseMatrix::from_fn(n, 3, |i, j| y1.get(i, j) + y2.get(i, j));
            prop_assert!(lhs.rel_inf_error(&rhs) <= 1e-12);
        }
    }
}
