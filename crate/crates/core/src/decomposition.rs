//! Tree decompositions, clique trees and balanced path decompositions.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::chordal::clique_tree;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// A tree (`edges` over node indices `0..bags.len()`) with a bag of vertices
/// per node. `width` is the declared width and is checked by
/// [`validate_tree_decomposition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
    pub width: usize,
}

impl TreeDecomposition {
    /// Decomposition with the width computed from the bags.
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let width = bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1);
        Self { bags, edges, width }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }
}

/// First violated condition of a tree decomposition, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Diagnosis {
    Valid { width: usize },
    NotATree,
    BagVertexOutOfRange { node: usize, vertex: usize },
    VertexMissing { vertex: usize },
    DisconnectedSubtree { vertex: usize },
    UncoveredEdge { u: usize, v: usize },
    WidthMismatch { declared: usize, actual: usize },
}

impl Diagnosis {
    pub fn is_valid(&self) -> bool {
        matches!(self, Diagnosis::Valid { .. })
    }
}

/// Checks, in order: tree shape, vertex-subtree connectivity, edge coverage
/// and the declared width.
pub fn validate_tree_decomposition(g: &Graph, td: &TreeDecomposition) -> Diagnosis {
    let m = td.bags.len();
    let Some(adj) = tree_adjacency(m, &td.edges) else {
        return Diagnosis::NotATree;
    };
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); g.n()];
    for (node, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            if v >= g.n() {
                return Diagnosis::BagVertexOutOfRange { node, vertex: v };
            }
            holders[v].push(node);
        }
    }
    for (v, nodes) in holders.iter().enumerate() {
        if nodes.is_empty() {
            return Diagnosis::VertexMissing { vertex: v };
        }
        if !induces_connected(&adj, nodes) {
            return Diagnosis::DisconnectedSubtree { vertex: v };
        }
    }
    for (u, v) in g.edges() {
        if !td.bags.iter().any(|b| b.contains(&u) && b.contains(&v)) {
            return Diagnosis::UncoveredEdge { u, v };
        }
    }
    let actual = td.bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1);
    if actual != td.width {
        return Diagnosis::WidthMismatch {
            declared: td.width,
            actual,
        };
    }
    Diagnosis::Valid { width: actual }
}

/// Adjacency lists if `edges` form a spanning tree on `0..m` (m ≥ 1).
fn tree_adjacency(m: usize, edges: &[(usize, usize)]) -> Option<Vec<Vec<usize>>> {
    if m == 0 || edges.len() != m - 1 {
        return None;
    }
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        if a >= m || b >= m || a == b {
            return None;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    let all: Vec<usize> = (0..m).collect();
    induces_connected(&adj, &all).then_some(adj)
}

fn induces_connected(adj: &[Vec<usize>], nodes: &[usize]) -> bool {
    if nodes.is_empty() {
        return true;
    }
    let mut member = vec![false; adj.len()];
    for &x in nodes {
        member[x] = true;
    }
    let mut seen = vec![false; adj.len()];
    seen[nodes[0]] = true;
    let mut queue = VecDeque::from([nodes[0]]);
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if member[y] && !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == nodes.len()
}

/// Tree decomposition whose bags all induce cliques.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueTree(TreeDecomposition);

impl CliqueTree {
    /// Validates `td` against `g`: a valid tree decomposition whose bags are cliques.
    pub fn new(g: &Graph, td: TreeDecomposition) -> Result<Self> {
        let diagnosis = validate_tree_decomposition(g, &td);
        if !diagnosis.is_valid() {
            return Err(Error::InvalidDecomposition(format!("{diagnosis:?}")));
        }
        if let Some(node) = td.bags.iter().position(|b| !g.is_clique(b)) {
            return Err(Error::InvalidDecomposition(format!(
                "bag {node} does not induce a clique"
            )));
        }
        Ok(Self(td))
    }

    pub(crate) fn new_unchecked(td: TreeDecomposition) -> Self {
        Self(td)
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.0.bags
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.0.edges
    }

    pub fn len(&self) -> usize {
        self.0.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.bags.is_empty()
    }

    pub fn width(&self) -> usize {
        self.0.width
    }

    pub fn as_decomposition(&self) -> &TreeDecomposition {
        &self.0
    }
}

/// A node whose removal leaves components of at most `node_count / 2` nodes.
/// Among all such nodes the lowest index is returned.
pub fn centroid_node(node_count: usize, edges: &[(usize, usize)]) -> Result<usize> {
    let adj = tree_adjacency(node_count, edges).ok_or(Error::NotATree)?;
    // subtree sizes from a DFS rooted at 0
    let mut parent = vec![usize::MAX; node_count];
    let mut order = Vec::with_capacity(node_count);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(x) = stack.pop() {
        order.push(x);
        for &y in &adj[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                stack.push(y);
            }
        }
    }
    let mut size = vec![1usize; node_count];
    for &x in order.iter().rev() {
        if x != 0 {
            size[parent[x]] += size[x];
        }
    }
    (0..node_count)
        .find(|&x| {
            let mut largest = node_count - size[x];
            for &y in &adj[x] {
                if y != 0 && parent[y] == x {
                    largest = largest.max(size[y]);
                }
            }
            2 * largest <= node_count
        })
        .ok_or(Error::NotATree)
}

/// Path decomposition whose bags are each partitioned into cliques.
///
/// `intervals[v] = (start, end)` are 0-based bag indices: `v` lies exactly in
/// bags `start..=end`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub clique_partition: Vec<Vec<Vec<usize>>>,
    pub intervals: Vec<(usize, usize)>,
}

impl PathDecomposition {
    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    pub fn start(&self, v: usize) -> usize {
        self.intervals[v].0
    }

    pub fn end(&self, v: usize) -> usize {
        self.intervals[v].1
    }

    pub fn max_parts(&self) -> usize {
        self.clique_partition.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// The same bags viewed as a tree decomposition on a path.
    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        let edges = (1..self.bags.len()).map(|i| (i - 1, i)).collect();
        TreeDecomposition::new(self.bags.clone(), edges)
    }

    /// Checks every structural invariant against `g`; `tree_size` is the size
    /// of the clique tree the decomposition was built from and bounds the
    /// number of clique parts per bag by `log2(tree_size) + 1`.
    pub fn check(&self, g: &Graph, tree_size: usize) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidDecomposition(msg));
        let diagnosis = validate_tree_decomposition(g, &self.as_tree_decomposition());
        if !diagnosis.is_valid() {
            return bad(format!("{diagnosis:?}"));
        }
        if self.intervals.len() != g.n() || self.clique_partition.len() != self.bags.len() {
            return bad("interval or partition table has the wrong length".into());
        }
        for v in 0..g.n() {
            let (s, e) = self.intervals[v];
            for (i, bag) in self.bags.iter().enumerate() {
                if bag.contains(&v) != (s <= i && i <= e) {
                    return bad(format!("interval of vertex {v} does not match bag {i}"));
                }
            }
        }
        for (i, (bag, parts)) in self.bags.iter().zip(&self.clique_partition).enumerate() {
            let mut union: Vec<usize> = parts.iter().flatten().copied().collect();
            union.sort_unstable();
            if union != *bag {
                return bad(format!("parts of bag {i} do not partition it"));
            }
            if let Some(p) = parts.iter().find(|p| !g.is_clique(p)) {
                return bad(format!("part {p:?} of bag {i} is not a clique"));
            }
            // |parts| <= log2(T) + 1  <=>  2^(|parts| - 1) <= T
            if parts.is_empty() || (1usize << (parts.len() - 1)) > tree_size.max(1) {
                return bad(format!(
                    "bag {i} has {} clique parts for a clique tree of size {tree_size}",
                    parts.len()
                ));
            }
        }
        Ok(())
    }
}

/// Builds a path decomposition whose bags split into at most
/// `log2(|ct|) + 1` cliques.
///
/// Recursion: take the bag `S` of a centroid node of the clique tree, build
/// decompositions of the components of `G - S` from their own clique trees,
/// concatenate them (components ordered by smallest vertex) and add `S` to
/// every bag. A component-free remainder yields the single bag `S`.
pub fn balanced_path_decomposition(g: &Graph, ct: &CliqueTree) -> Result<PathDecomposition> {
    let ct = CliqueTree::new(g, ct.as_decomposition().clone())?;
    let blocks = build_blocks(g, ct.bags(), ct.edges())?;
    let mut bags = Vec::with_capacity(blocks.len());
    let mut clique_partition = Vec::with_capacity(blocks.len());
    for parts in blocks {
        let mut bag: Vec<usize> = parts.iter().flatten().copied().collect();
        bag.sort_unstable();
        bags.push(bag);
        clique_partition.push(parts);
    }
    let mut intervals = vec![(usize::MAX, 0usize); g.n()];
    for (i, bag) in bags.iter().enumerate() {
        for &v in bag {
            let iv = &mut intervals[v];
            iv.0 = iv.0.min(i);
            iv.1 = iv.1.max(i);
        }
    }
    Ok(PathDecomposition {
        bags,
        clique_partition,
        intervals,
    })
}

/// Returns the bags (as clique partitions, original labels) for the graph
/// covered by `bags`.
fn build_blocks(
    g: &Graph,
    bags: &[Vec<usize>],
    edges: &[(usize, usize)],
) -> Result<Vec<Vec<Vec<usize>>>> {
    if bags.len() == 1 {
        return Ok(vec![vec![bags[0].clone()]]);
    }
    let u = centroid_node(bags.len(), edges)?;
    let separator = &bags[u];
    let mut rest: Vec<usize> = bags
        .iter()
        .flatten()
        .copied()
        .filter(|v| !separator.contains(v))
        .collect();
    rest.sort_unstable();
    rest.dedup();
    if rest.is_empty() {
        return Ok(vec![vec![separator.clone()]]);
    }
    let (remainder, labels) = g.induced_subgraph(&rest);
    let mut out = Vec::new();
    for comp in remainder.components() {
        let (sub, sub_labels) = remainder.induced_subgraph(&comp);
        let sub_tree = clique_tree(&sub)?;
        let child = build_blocks(&sub, sub_tree.bags(), sub_tree.edges())?;
        for parts in child {
            let mut relabelled = Vec::with_capacity(parts.len() + 1);
            relabelled.push(separator.clone());
            for p in parts {
                let mut q: Vec<usize> = p.iter().map(|&x| labels[sub_labels[x]]).collect();
                q.sort_unstable();
                relabelled.push(q);
            }
            out.push(relabelled);
        }
    }
    Ok(out)
}
