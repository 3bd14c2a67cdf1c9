//! Reproducible graph generators. Every generator returns a symmetric pattern
//! matrix (all values 1.0) without self loops.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{csr_from_coo, CooEntries, DenseMatrix, SparseSymMatrix};
use crate::zipf::{ZipfModel, ZipfSampler};

fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> SparseSymMatrix {
    let mut coo = CooEntries::new(n);
    for (u, v) in edges {
        coo.push_sym(u, v, 1.0);
    }
    csr_from_coo(&coo).expect("generator indices are in range")
}

pub fn path(n: usize) -> SparseSymMatrix {
    from_edges(n, (1..n).map(|i| (i - 1, i)))
}

/// Star with center 0 and leaves `1..=leaves`.
pub fn star(leaves: usize) -> SparseSymMatrix {
    from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)))
}

pub fn cycle(n: usize) -> SparseSymMatrix {
    if n < 3 {
        return path(n);
    }
    from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
}

/// Heap-ordered binary tree on `n` vertices: parent of `i` is `(i - 1) / 2`.
pub fn binary_tree(n: usize) -> SparseSymMatrix {
    from_edges(n, (1..n).map(|i| ((i - 1) / 2, i)))
}

/// Decodes a Prüfer sequence of length `n - 2` into the edges of a labeled tree.
pub fn prufer_decode(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    assert_eq!(seq.len(), n - 2, "Prüfer sequence must have length n - 2");
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let Reverse(leaf) = leaves.pop().expect("a tree always has a leaf");
        edges.push((leaf, s));
        degree[s] -= 1;
        if degree[s] == 1 {
            leaves.push(Reverse(s));
        }
    }
    let Reverse(u) = leaves.pop().expect("two leaves remain");
    let Reverse(v) = leaves.pop().expect("two leaves remain");
    edges.push((u, v));
    edges
}

/// Uniformly random labeled tree via a random Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> SparseSymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.gen_range(0..n)).collect();
    from_edges(n, prufer_decode(n, &seq))
}

/// Every labeled tree on `n` vertices, in lexicographic Prüfer order.
pub fn all_labeled_trees(n: usize) -> impl Iterator<Item = SparseSymMatrix> {
    let len = n.saturating_sub(2);
    let total = if n < 2 { 1 } else { n.pow(len as u32) };
    (0..total).map(move |mut code| {
        let mut seq = vec![0usize; len];
        for s in seq.iter_mut().rev() {
            *s = code % n;
            code /= n;
        }
        from_edges(n, prufer_decode(n, &seq))
    })
}

/// Configuration-model graph with truncated-Zipf degrees on `[1, n - 1]`.
///
/// Stubs are shuffled and paired; self loops and repeated edges are dropped.
pub fn power_law(n: usize, shape: f64, seed: u64) -> Result<SparseSymMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument("power-law graph needs at least 2 vertices".into()));
    }
    let sampler = ZipfSampler::new(&ZipfModel::new(n as u64 - 1, shape)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = Vec::new();
    for v in 0..n {
        let d = sampler.sample(&mut rng) as usize;
        stubs.extend(std::iter::repeat_n(v, d));
    }
    if stubs.len() % 2 == 1 {
        stubs.pop();
    }
    stubs.shuffle(&mut rng);
    let mut edges: Vec<(usize, usize)> = stubs
        .chunks_exact(2)
        .filter(|p| p[0] != p[1])
        .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(from_edges(n, edges))
}

/// Random symmetric matrix with about `per_row` off-diagonal entries per row
/// and values in `[0.5, 2)`; used by tests and sweeps.
pub fn random_symmetric(n: usize, per_row: usize, seed: u64) -> SparseSymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coo = CooEntries::new(n);
    for i in 0..n {
        for _ in 0..per_row.div_ceil(2) {
            let j = rng.gen_range(0..n);
            if j != i {
                let v: f64 = rng.gen_range(0.5..2.0);
                coo.push_sym(i, j, v);
            }
        }
    }
    csr_from_coo(&coo).expect("indices in range")
}

/// Dense matrix with entries uniform in `[0, 1)`, filled row by row.
pub fn uniform_dense(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen::<f64>())
}

/// Parses a generator description such as `path:100`, `star:9`, `cycle:12`,
/// `bintree:31`, `tree:1000` or `powerlaw:65536:2.0`. `seed` feeds the random
/// generators.
pub fn from_spec(spec: &str, seed: u64) -> Result<SparseSymMatrix> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::InvalidArgument(format!("bad generator spec `{spec}`"));
    let count = |s: Option<&&str>| -> Result<usize> { s.ok_or_else(bad)?.parse().map_err(|_| bad()) };
    match parts[0] {
        "path" => Ok(path(count(parts.get(1))?)),
        "star" => Ok(star(count(parts.get(1))?)),
        "cycle" => Ok(cycle(count(parts.get(1))?)),
        "bintree" => Ok(binary_tree(count(parts.get(1))?)),
        "tree" => Ok(random_tree(count(parts.get(1))?, seed)),
        "powerlaw" => {
            let n = count(parts.get(1))?;
            let shape = match parts.get(2) {
                Some(s) => s.parse().map_err(|_| bad())?,
                None => 2.0,
            };
            power_law(n, shape, seed)
        }
        "random" => {
            let n = count(parts.get(1))?;
            let per_row = match parts.get(2) {
                Some(_) => count(parts.get(2))?,
                None => 4,
            };
            Ok(random_symmetric(n, per_row, seed))
        }
        _ => Err(bad()),
    }
}
