use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{CooEntries, LinearArrangement, SparseSymMatrix, csr_from_coo};

/// Rooted spanning forest. `parent[v] == v` marks a root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    n: usize,
    parent: Vec<usize>,
    component_id: Vec<usize>,
    /// Sizes indexed by component id.
    sizes_by_id: Vec<usize>,
    component_sizes: Vec<usize>,
}

impl Forest {
    /// Builds a forest from undirected tree edges, rooting each component at
    /// its smallest vertex id. Fails if the edges contain a cycle.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj_count = vec![0usize; n + 1];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange { row: u, col: v, n });
            }
            if u == v {
                return Err(Error::NotATree(format!("self loop at {u}")));
            }
            adj_count[u + 1] += 1;
            adj_count[v + 1] += 1;
        }
        for i in 0..n {
            adj_count[i + 1] += adj_count[i];
        }
        let mut fill = adj_count.clone();
        let mut adj = vec![0usize; 2 * edges.len()];
        for &(u, v) in edges {
            adj[fill[u]] = v;
            fill[u] += 1;
            adj[fill[v]] = u;
            fill[v] += 1;
        }
        let mut parent = vec![usize::MAX; n];
        let mut component_id = vec![usize::MAX; n];
        let mut sizes_by_id = Vec::new();
        let mut queue = Vec::with_capacity(n);
        for root in 0..n {
            if parent[root] != usize::MAX {
                continue;
            }
            let id = sizes_by_id.len();
            parent[root] = root;
            component_id[root] = id;
            queue.clear();
            queue.push(root);
            let mut head = 0;
            while head < queue.len() {
                let u = queue[head];
                head += 1;
                for &w in &adj[adj_count[u]..adj_count[u + 1]] {
                    if parent[w] == usize::MAX {
                        parent[w] = u;
                        component_id[w] = id;
                        queue.push(w);
                    }
                }
            }
            sizes_by_id.push(queue.len());
        }
        if edges.len() + sizes_by_id.len() != n {
            return Err(Error::NotATree("edge set contains a cycle".into()));
        }
        Ok(Self::assemble(n, parent, component_id, sizes_by_id))
    }

    /// Builds a forest from a parent array (`parent[v] == v` for roots).
    pub fn from_parents(parent: Vec<usize>) -> Result<Self> {
        let n = parent.len();
        if let Some(v) = (0..n).find(|&v| parent[v] >= n) {
            return Err(Error::IndexOutOfRange { row: v, col: parent[v], n });
        }
        // resolve roots iteratively, detecting cycles by step count
        let mut component_id = vec![usize::MAX; n];
        let mut sizes_by_id = Vec::new();
        let mut root_id = vec![usize::MAX; n];
        for v in 0..n {
            if parent[v] == v {
                root_id[v] = sizes_by_id.len();
                sizes_by_id.push(0);
            }
        }
        let mut trail = Vec::new();
        for v in 0..n {
            trail.clear();
            let mut u = v;
            while component_id[u] == usize::MAX && parent[u] != u {
                trail.push(u);
                if trail.len() > n {
                    return Err(Error::NotATree("parent pointers contain a cycle".into()));
                }
                u = parent[u];
            }
            let id = if parent[u] == u { root_id[u] } else { component_id[u] };
            component_id[u] = id;
            for &w in &trail {
                component_id[w] = id;
            }
        }
        for v in 0..n {
            sizes_by_id[component_id[v]] += 1;
        }
        Ok(Self::assemble(n, parent, component_id, sizes_by_id))
    }

    fn assemble(n: usize, parent: Vec<usize>, component_id: Vec<usize>, sizes_by_id: Vec<usize>) -> Self {
        let mut component_sizes = sizes_by_id.clone();
        component_sizes.sort_unstable_by(|a, b| b.cmp(a));
        Self { n, parent, component_id, sizes_by_id, component_sizes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parent(&self) -> &[usize] {
        &self.parent
    }

    pub fn component_id(&self) -> &[usize] {
        &self.component_id
    }

    /// Component sizes, largest first.
    pub fn component_sizes(&self) -> &[usize] {
        &self.component_sizes
    }

    pub fn edge_count(&self) -> usize {
        self.n - self.sizes_by_id.len()
    }

    /// Tree edges as `(child, parent)` pairs in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).filter(|&v| self.parent[v] != v).map(|v| (v, self.parent[v]))
    }

    /// Pattern matrix of the forest.
    pub fn to_matrix(&self) -> SparseSymMatrix {
        let mut coo = CooEntries::new(self.n);
        for (u, v) in self.edges() {
            coo.push_sym(u, v, 1.0);
        }
        csr_from_coo(&coo).expect("forest edges are in range")
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Uniform `[0, 1)` weight of the canonical edge `(u, v)`, `u < v`.
///
/// Every edge draws from its own ChaCha stream keyed by the pair, so the
/// weight does not depend on the order in which edges are visited.
fn edge_weight(seed: u64, u: usize, v: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((u as u64) << 32) | v as u64);
    rng.gen()
}

/// Minimum spanning forest under independent uniform edge weights (Kruskal).
/// Deterministic for a given seed; self loops are ignored.
pub fn random_spanning_forest(a: &SparseSymMatrix, seed: u64) -> Forest {
    let mut edges: Vec<(f64, usize, usize)> = a
        .upper_entries()
        .filter(|&(u, v, _)| u != v)
        .map(|(u, v, _)| (edge_weight(seed, u, v), u, v))
        .collect();
    edges.sort_unstable_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut sets = DisjointSets::new(a.n());
    let tree: Vec<(usize, usize)> =
        edges.into_iter().filter(|&(_, u, v)| sets.union(u, v)).map(|(_, u, v)| (u, v)).collect();
    Forest::from_edges(a.n(), &tree).expect("Kruskal output is acyclic")
}

/// Smallest-first order of a forest.
///
/// Components are laid out largest first (ties: smallest contained vertex).
/// Inside a tree the root comes first, then every child subtree as a
/// contiguous block, children in increasing subtree size (ties: smaller id),
/// recursively.
pub fn smallest_first_order(forest: &Forest) -> LinearArrangement {
    let n = forest.n;
    let parent = &forest.parent;
    let mut child_count = vec![0usize; n + 1];
    for v in 0..n {
        if parent[v] != v {
            child_count[parent[v] + 1] += 1;
        }
    }
    for i in 0..n {
        child_count[i + 1] += child_count[i];
    }
    let offsets = child_count;
    let mut fill = offsets.clone();
    let mut children = vec![0usize; n - forest.sizes_by_id.len()];
    for v in 0..n {
        if parent[v] != v {
            children[fill[parent[v]]] = v;
            fill[parent[v]] += 1;
        }
    }

    // top-down order from the roots, then accumulate subtree sizes bottom-up
    let roots: Vec<usize> = (0..n).filter(|&v| parent[v] == v).collect();
    let mut order = roots.clone();
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        order.extend_from_slice(&children[offsets[u]..offsets[u + 1]]);
    }
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if parent[v] != v {
            size[parent[v]] += size[v];
        }
    }
    for u in 0..n {
        children[offsets[u]..offsets[u + 1]].sort_unstable_by_key(|&c| (size[c], c));
    }

    let mut min_id = vec![usize::MAX; forest.sizes_by_id.len()];
    for v in 0..n {
        let c = forest.component_id[v];
        min_id[c] = min_id[c].min(v);
    }
    let mut sorted_roots = roots;
    sorted_roots.sort_unstable_by_key(|&r| {
        let c = forest.component_id[r];
        (std::cmp::Reverse(forest.sizes_by_id[c]), min_id[c])
    });

    let mut layout = Vec::with_capacity(n);
    let mut stack = Vec::new();
    for r in sorted_roots {
        stack.push(r);
        while let Some(u) = stack.pop() {
            layout.push(u);
            stack.extend(children[offsets[u]..offsets[u + 1]].iter().rev());
        }
    }
    LinearArrangement::from_order(layout).expect("every vertex is visited once")
}

/// Random spanning forest followed by smallest-first order.
pub fn random_forest_arrangement(a: &SparseSymMatrix, seed: u64) -> LinearArrangement {
    smallest_first_order(&random_spanning_forest(a, seed))
}
