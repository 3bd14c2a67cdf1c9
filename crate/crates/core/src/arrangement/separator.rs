use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::sparse::{LinearArrangement, SparseSymMatrix};

/// Produces a 2/3-separator of the subgraph induced by `vertices`: removing
/// the returned set must leave components of at most `⌈2k/3⌉` vertices, where
/// `k = vertices.len()`.
pub trait SeparatorOracle {
    fn separator(&self, graph: &SparseSymMatrix, vertices: &[usize]) -> Result<Vec<usize>>;
}

/// Single-vertex separator for trees.
#[derive(Clone, Copy, Debug, Default)]
pub struct CentroidOracle;

impl SeparatorOracle for CentroidOracle {
    fn separator(&self, graph: &SparseSymMatrix, vertices: &[usize]) -> Result<Vec<usize>> {
        centroid_separator(graph, vertices).map(|c| vec![c])
    }
}

/// Centroid of the tree induced by `vertices`: every component left after
/// removing it has at most `⌊k/2⌋` vertices. Ties go to the smallest id.
pub fn centroid_separator(graph: &SparseSymMatrix, vertices: &[usize]) -> Result<usize> {
    let k = vertices.len();
    if k == 0 {
        return Err(Error::NotATree("empty vertex set".into()));
    }
    let local: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if local.len() != k {
        return Err(Error::InvalidArgument("duplicate vertices in subset".into()));
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut edges = 0usize;
    for (i, &v) in vertices.iter().enumerate() {
        if v >= graph.n() {
            return Err(Error::IndexOutOfRange { row: v, col: v, n: graph.n() });
        }
        for &w in graph.row(v).0 {
            if w == v {
                return Err(Error::NotATree(format!("self loop at {v}")));
            }
            if let Some(&j) = local.get(&w) {
                adj[i].push(j);
                if i < j {
                    edges += 1;
                }
            }
        }
    }
    if edges + 1 != k {
        return Err(Error::NotATree(format!("{k} vertices but {edges} edges")));
    }
    let mut parent = vec![usize::MAX; k];
    let mut order = Vec::with_capacity(k);
    parent[0] = 0;
    order.push(0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &w in &adj[u] {
            if parent[w] == usize::MAX {
                parent[w] = u;
                order.push(w);
            }
        }
    }
    if order.len() != k {
        return Err(Error::NotATree("induced subgraph is disconnected".into()));
    }
    let mut size = vec![1usize; k];
    let mut largest_child = vec![0usize; k];
    for &u in order.iter().skip(1).rev() {
        let p = parent[u];
        size[p] += size[u];
        largest_child[p] = largest_child[p].max(size[u]);
    }
    let best = (0..k)
        .min_by_key(|&i| (largest_child[i].max(k - size[i]), vertices[i]))
        .expect("k > 0");
    debug_assert!(largest_child[best].max(k - size[best]) <= k / 2);
    Ok(vertices[best])
}

/// Recursive separator layout.
///
/// A connected subgraph is split by the oracle: separator vertices come first
/// (by id), followed by the remaining components in increasing size (ties:
/// smallest id), each laid out recursively. A disconnected subgraph is split
/// into its components directly. Subgraphs of at most two vertices are placed
/// by id.
pub fn separator_la(a: &SparseSymMatrix, oracle: &dyn SeparatorOracle) -> Result<LinearArrangement> {
    let n = a.n();
    let mut stamp = vec![0u32; n];
    let mut seen = vec![0u32; n];
    let mut epoch = 0u32;
    let mut layout = Vec::with_capacity(n);
    let mut stack: Vec<Vec<usize>> = vec![(0..n).collect()];

    while let Some(mut part) = stack.pop() {
        if part.len() <= 2 {
            part.sort_unstable();
            layout.extend(part);
            continue;
        }
        epoch += 1;
        for &v in &part {
            stamp[v] = epoch;
        }
        let whole = components(a, &part, &stamp, &mut seen, epoch);
        let (sep, rest) = if whole.len() > 1 {
            (Vec::new(), whole)
        } else {
            let mut sep = oracle.separator(a, &part)?;
            sep.sort_unstable();
            sep.dedup();
            if sep.is_empty() {
                return Err(Error::InvalidSeparator("empty separator for a connected subgraph".into()));
            }
            if let Some(&v) = sep.iter().find(|&&v| v >= n || stamp[v] != epoch) {
                return Err(Error::InvalidSeparator(format!("vertex {v} is not in the subgraph")));
            }
            epoch += 1;
            for &v in &part {
                stamp[v] = epoch;
            }
            for &v in &sep {
                stamp[v] = 0;
            }
            let remaining: Vec<usize> = part.iter().copied().filter(|&v| stamp[v] == epoch).collect();
            let comps = components(a, &remaining, &stamp, &mut seen, epoch);
            let limit = (2 * part.len()).div_ceil(3);
            if let Some(c) = comps.iter().find(|c| c.len() > limit) {
                return Err(Error::InvalidSeparator(format!(
                    "component of size {} exceeds {limit} for a subgraph of {} vertices",
                    c.len(),
                    part.len()
                )));
            }
            (sep, comps)
        };
        layout.extend(sep);
        stack.extend(rest.into_iter().rev());
    }
    LinearArrangement::from_order(layout)
}

/// Connected components of the vertices stamped `epoch`, each sorted by id,
/// ordered by (size, smallest id).
fn components(
    a: &SparseSymMatrix,
    vertices: &[usize],
    stamp: &[u32],
    seen: &mut [u32],
    epoch: u32,
) -> Vec<Vec<usize>> {
    let mut comps = Vec::new();
    for &s in vertices {
        if seen[s] == epoch {
            continue;
        }
        seen[s] = epoch;
        let mut comp = vec![s];
        let mut head = 0;
        while head < comp.len() {
            let u = comp[head];
            head += 1;
            for &w in a.row(u).0 {
                if stamp[w] == epoch && seen[w] != epoch {
                    seen[w] = epoch;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort_by_key(|c| (c.len(), c[0]));
    comps
}
