//! Perfect elimination orderings, maximum cardinality search and clique trees.
//!
//! Orderings follow the convention "the neighbours of `order[i]` that appear
//! earlier in the ordering induce a clique". Maximum cardinality search visits
//! vertices in exactly such an order on chordal graphs (it is the reverse of
//! the classical elimination sequence).

use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::{CliqueTree, TreeDecomposition};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EliminationOrdering {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl EliminationOrdering {
    /// Wraps `order` after checking that it is a permutation of `0..n`.
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        let mut position = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || position[v] != usize::MAX {
                return Err(Error::NotPermutation(n));
            }
            position[v] = i;
        }
        Ok(Self { order, position })
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect()).expect("identity is a permutation")
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of vertex `v` in the ordering.
    pub fn position(&self, v: usize) -> usize {
        self.position[v]
    }

    pub fn vertex_at(&self, i: usize) -> usize {
        self.order[i]
    }

    /// Neighbours of `v` placed before it, sorted by vertex label.
    pub fn earlier_neighbors(&self, g: &Graph, v: usize) -> Vec<usize> {
        let p = self.position[v];
        g.neighbors(v)
            .iter()
            .copied()
            .filter(|&w| self.position[w] < p)
            .collect()
    }

    pub fn reversed(&self) -> Self {
        let mut order = self.order.clone();
        order.reverse();
        Self::new(order).expect("reversal of a permutation")
    }
}

/// Maximum cardinality search with lowest-index tie-breaking.
///
/// Returns the visit order and whether it is a perfect elimination ordering,
/// i.e. whether the graph is chordal.
pub fn maximum_cardinality_search(g: &Graph) -> (EliminationOrdering, bool) {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("an unvisited vertex remains");
        visited[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    let ordering = EliminationOrdering::new(order).expect("search visits each vertex once");
    let chordal = first_peo_violation(g, &ordering).is_none();
    (ordering, chordal)
}

/// True iff the earlier neighbours of every vertex are pairwise adjacent.
pub fn verify_peo(g: &Graph, ordering: &EliminationOrdering) -> Result<bool> {
    if ordering.len() != g.n() {
        return Err(Error::NotPermutation(g.n()));
    }
    Ok(first_peo_violation(g, ordering).is_none())
}

/// First vertex (in ordering order) whose earlier neighbours are not a clique.
pub fn first_peo_violation(g: &Graph, ordering: &EliminationOrdering) -> Option<usize> {
    ordering
        .order()
        .iter()
        .copied()
        .find(|&v| !g.is_clique(&ordering.earlier_neighbors(g, v)))
}

pub fn is_chordal(g: &Graph) -> bool {
    maximum_cardinality_search(g).1
}

/// Maximal cliques of a chordal graph, read off a perfect elimination
/// ordering: each is `{v} ∪ earlier(v)` for some `v`, kept when not contained
/// in another candidate. Cliques are sorted and listed by defining vertex
/// position.
pub fn maximal_cliques(g: &Graph, ordering: &EliminationOrdering) -> Vec<Vec<usize>> {
    let candidates: Vec<Vec<usize>> = ordering
        .order()
        .iter()
        .map(|&v| {
            let mut c = ordering.earlier_neighbors(g, v);
            c.push(v);
            c.sort_unstable();
            c
        })
        .collect();
    candidates
        .iter()
        .enumerate()
        .filter(|(i, c)| {
            !candidates.iter().enumerate().any(|(j, d)| {
                j != *i && d.len() >= c.len() && is_subset(c, d) && (d.len() > c.len() || j < *i)
            })
        })
        .map(|(_, c)| c.clone())
        .collect()
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|x| b.binary_search(x).is_ok()).count()
}

/// Clique tree of a chordal graph: the maximal cliques joined by a
/// maximum-weight spanning tree on pairwise intersection sizes (Prim, lowest
/// index on ties).
pub fn clique_tree(g: &Graph) -> Result<CliqueTree> {
    let (ordering, chordal) = maximum_cardinality_search(g);
    if !chordal {
        let witness = first_peo_violation(g, &ordering).expect("non-chordal has a violation");
        return Err(Error::NotChordal(witness));
    }
    let bags = maximal_cliques(g, &ordering);
    let m = bags.len();
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    if m > 0 {
        let mut in_tree = vec![false; m];
        // best[j] = (weight, attaching node) for nodes outside the tree
        let mut best: Vec<Option<(usize, usize)>> = vec![None; m];
        in_tree[0] = true;
        for j in 1..m {
            best[j] = Some((intersection_size(&bags[0], &bags[j]), 0));
        }
        for _ in 1..m {
            let next = (0..m)
                .filter(|&j| !in_tree[j])
                .max_by(|&a, &b| {
                    let wa = best[a].map_or(0, |x| x.0);
                    let wb = best[b].map_or(0, |x| x.0);
                    wa.cmp(&wb).then(b.cmp(&a))
                })
                .expect("a node remains outside the tree");
            let (_, parent) = best[next].expect("weights initialised");
            in_tree[next] = true;
            edges.push((parent.min(next), parent.max(next)));
            for j in 0..m {
                if !in_tree[j] {
                    let w = intersection_size(&bags[next], &bags[j]);
                    if best[j].is_none_or(|(bw, _)| w > bw) {
                        best[j] = Some((w, next));
                    }
                }
            }
        }
    }
    let width = bags.iter().map(Vec::len).max().unwrap_or(0).saturating_sub(1);
    Ok(CliqueTree::new_unchecked(TreeDecomposition {
        bags,
        edges,
        width,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::validate_tree_decomposition;

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn triangle_any_order() {
        let g = Graph::complete(3);
        assert!(maximum_cardinality_search(&g).1);
        for p in permutations(3) {
            assert!(verify_peo(&g, &EliminationOrdering::new(p).unwrap()).unwrap());
        }
    }

    #[test]
    fn four_cycle_not_chordal() {
        let g = Graph::cycle(4);
        assert!(!maximum_cardinality_search(&g).1);
        for p in permutations(4) {
            assert!(!verify_peo(&g, &EliminationOrdering::new(p).unwrap()).unwrap());
        }
        assert!(matches!(clique_tree(&g), Err(Error::NotChordal(_))));
    }

    #[test]
    fn path_p4() {
        let g = Graph::path(4);
        let (ord, chordal) = maximum_cardinality_search(&g);
        assert!(chordal);
        assert!(verify_peo(&g, &ord).unwrap());
        let identity = EliminationOrdering::identity(4);
        assert!(verify_peo(&g, &identity).unwrap());
        // some orderings fail: a middle vertex after both of its neighbours
        let bad = EliminationOrdering::new(vec![0, 2, 1, 3]).unwrap();
        assert!(!verify_peo(&g, &bad).unwrap());
        let passing = permutations(4)
            .into_iter()
            .filter(|p| verify_peo(&g, &EliminationOrdering::new(p.clone()).unwrap()).unwrap())
            .count();
        assert!(passing > 0 && passing < 24);
    }

    #[test]
    fn rejects_non_permutation() {
        assert_eq!(
            EliminationOrdering::new(vec![0, 0, 1]),
            Err(Error::NotPermutation(3))
        );
        let g = Graph::path(3);
        let short = EliminationOrdering::identity(2);
        assert_eq!(verify_peo(&g, &short), Err(Error::NotPermutation(3)));
    }

    #[test]
    fn clique_trees_of_small_graphs() {
        let t = clique_tree(&Graph::complete(3)).unwrap();
        assert_eq!(t.bags(), &[vec![0, 1, 2]]);

        let t = clique_tree(&Graph::path(4)).unwrap();
        let mut bags = t.bags().to_vec();
        bags.sort();
        assert_eq!(bags, [[0, 1], [1, 2], [2, 3]]);
        assert_eq!(t.edges().len(), 2);
        // the middle bag {1,2} is adjacent to both others
        let middle = t.bags().iter().position(|b| b == &[1, 2]).unwrap();
        assert!(t.edges().iter().all(|&(a, b)| a == middle || b == middle));
        assert!(validate_tree_decomposition(&Graph::path(4), t.as_decomposition()).is_valid());

        let t = clique_tree(&Graph::star(3)).unwrap();
        let mut bags = t.bags().to_vec();
        bags.sort();
        assert_eq!(bags, [[0, 1], [0, 2], [0, 3]]);
    }

    #[test]
    fn disconnected_chordal() {
        let g = Graph::new(5, [(0, 1), (2, 3), (3, 4), (2, 4)]).unwrap();
        let t = clique_tree(&g).unwrap();
        assert_eq!(t.bags().len(), 2);
        assert!(validate_tree_decomposition(&g, t.as_decomposition()).is_valid());
    }
}
