//! Linear arrangements: cost, band counts, and the constructions used by the
//! decomposition (smallest-first tree order, separator recursion, random
//! spanning forests), plus an exhaustive minimum-linear-arrangement oracle for
//! tiny graphs.

mod forest;
mod separator;

pub use forest::{random_forest_arrangement, random_spanning_forest, smallest_first_order, Forest};
pub use separator::{centroid_separator, separator_la, CentroidOracle, SeparatorOracle};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::sparse::{LinearArrangement, SparseSymMatrix};

/// Largest vertex count accepted by [`brute_force_mla`].
pub const MLA_MAX_N: usize = 10;

fn check_len(a: &SparseSymMatrix, pi: &LinearArrangement) -> Result<()> {
    if pi.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "arrangement of length {} for a graph on {} vertices",
            pi.len(),
            a.n()
        )));
    }
    Ok(())
}

/// `Σ |π(u) − π(v)|` over undirected edges, each counted once. Self loops add 0.
pub fn arrangement_cost(a: &SparseSymMatrix, pi: &LinearArrangement) -> Result<u64> {
    check_len(a, pi)?;
    Ok(a.upper_entries().map(|(u, v, _)| pi.position(u).abs_diff(pi.position(v)) as u64).sum())
}

/// Number of undirected edges (self loops included) with `|π(u) − π(v)| <= width`.
pub fn band_edge_count(a: &SparseSymMatrix, pi: &LinearArrangement, width: usize) -> Result<usize> {
    check_len(a, pi)?;
    Ok(a.upper_entries().filter(|&(u, v, _)| pi.position(u).abs_diff(pi.position(v)) <= width).count())
}

/// Exhaustive minimum linear arrangement for `n <= 10`.
///
/// Ties are broken by the lexicographically smallest forward array.
pub fn brute_force_mla(a: &SparseSymMatrix) -> Result<(LinearArrangement, u64)> {
    brute_force_mla_with(a, Execution::Sequential)
}

/// [`brute_force_mla`], optionally splitting the search by the position of
/// vertex 0 across threads. The result is identical in both modes.
pub fn brute_force_mla_with(
    a: &SparseSymMatrix,
    exec: Execution,
) -> Result<(LinearArrangement, u64)> {
    let n = a.n();
    if n > MLA_MAX_N {
        return Err(Error::TooLarge { n, max: MLA_MAX_N });
    }
    if n == 0 {
        return Ok((LinearArrangement::identity(0), 0));
    }
    let edges: Vec<(usize, usize)> =
        a.upper_entries().filter(|&(u, v, _)| u != v).map(|(u, v, _)| (u, v)).collect();
    let branches = exec::map_range(exec, n, |first| {
        // lexicographically smallest permutation starting with `first`
        let mut forward: Vec<usize> = std::iter::once(first).chain((0..n).filter(|&p| p != first)).collect();
        let mut best = (u64::MAX, forward.clone());
        loop {
            let cost: u64 = edges.iter().map(|&(u, v)| forward[u].abs_diff(forward[v]) as u64).sum();
            if cost < best.0 {
                best = (cost, forward.clone());
            }
            if !next_permutation(&mut forward[1..]) {
                break;
            }
        }
        best
    });
    let (cost, forward) = branches.into_iter().min().expect("n > 0");
    Ok((LinearArrangement::from_forward(forward)?, cost))
}

/// Advances to the next lexicographic permutation; false after the last one.
fn next_permutation(xs: &mut [usize]) -> bool {
    if xs.len() < 2 {
        return false;
    }
    let Some(i) = (0..xs.len() - 1).rev().find(|&i| xs[i] < xs[i + 1]) else {
        return false;
    };
    let j = (i + 1..xs.len()).rev().find(|&j| xs[j] > xs[i]).expect("exists by choice of i");
    xs.swap(i, j);
    xs[i + 1..].reverse();
    true
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::sparse::{csr_from_coo, CooEntries};

    pub(crate) fn graph(n: usize, edges: &[(usize, usize)]) -> SparseSymMatrix {
        let mut c = CooEntries::new(n);
        for &(u, v) in edges {
            c.push_sym(u, v, 1.0);
        }
        csr_from_coo(&c).unwrap()
    }

    pub(crate) fn path(n: usize) -> SparseSymMatrix {
        graph(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    pub(crate) fn star(leaves: usize) -> SparseSymMatrix {
        graph(leaves + 1, &(1..=leaves).map(|i| (0, i)).collect::<Vec<_>>())
    }

    #[test]
    fn cost_examples() {
        let id4 = LinearArrangement::identity(4);
        assert_eq!(arrangement_cost(&path(4), &id4).unwrap(), 3);
        assert_eq!(arrangement_cost(&star(4), &LinearArrangement::identity(5)).unwrap(), 10);
        assert!(arrangement_cost(&path(4), &LinearArrangement::identity(3)).is_err());
        let looped = graph(2, &[(0, 0), (0, 1)]);
        assert_eq!(arrangement_cost(&looped, &LinearArrangement::identity(2)).unwrap(), 1);
    }

    #[test]
    fn band_examples() {
        let id4 = LinearArrangement::identity(4);
        assert_eq!(band_edge_count(&path(4), &id4, 1).unwrap(), 3);
        assert_eq!(band_edge_count(&path(4), &id4, 0).unwrap(), 0);
    }

    #[test]
    fn mla_examples() {
        assert_eq!(brute_force_mla(&path(4)).unwrap().1, 3);
        let (pi, cost) = brute_force_mla(&star(4)).unwrap();
        assert_eq!(cost, 6);
        // lexicographically first optimum, found by an independent enumeration
        assert_eq!(pi.forward(), &[2, 0, 1, 3, 4]);
        let c4 = graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        assert_eq!(brute_force_mla(&c4).unwrap().1, 6);
        assert!(matches!(brute_force_mla(&path(11)), Err(Error::TooLarge { .. })));
        assert_eq!(brute_force_mla(&SparseSymMatrix::empty(0)).unwrap().1, 0);
    }

    #[test]
    fn mla_parallel_matches_sequential() {
        let g = graph(7, &[(0, 1), (0, 2), (0, 3), (3, 4), (3, 5), (5, 6), (1, 6)]);
        assert_eq!(
            brute_force_mla(&g).unwrap(),
            brute_force_mla_with(&g, Execution::Parallel).unwrap()
        );
    }

    #[test]
    fn star_mla_lower_bound_flavor() {
        for d in 1..=8 {
            let cost = brute_force_mla(&star(d)).unwrap().1 as f64;
            assert!(cost >= (d * d) as f64 / 8.0, "d = {d}");
        }
    }

    #[test]
    fn next_permutation_enumerates_all() {
        let mut xs = vec![0, 1, 2, 3];
        let mut count = 1;
        while next_permutation(&mut xs) {
            count += 1;
        }
        assert_eq!(count, 24);
        assert_eq!(xs, vec![3, 2, 1, 0]);
    }
}
