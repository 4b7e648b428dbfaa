//! Instance generators: random chordal graphs, random colourings and list
//! assignments, and exhaustive small-graph corpora.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::chordal::EliminationOrdering;
use crate::coloring::{Color, Coloring, ListAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Random chordal graph on `0..n` whose label order is a perfect
/// elimination ordering and whose cliques have at most `max_clique`
/// vertices. Vertex `i` attaches to a random subset, always containing a
/// uniformly chosen earlier vertex `u`, of the clique formed by `u` and its
/// earlier neighbours. The result is connected when `max_clique ≥ 2`.
pub fn random_chordal<R: RngCore + ?Sized>(n: usize, max_clique: usize, rng: &mut R) -> Result<Graph> {
    if max_clique == 0 && n > 0 {
        return Err(Error::Precondition("max clique size must be at least 1".into()));
    }
    let mut earlier: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut edges = Vec::new();
    for i in 1..n {
        if max_clique < 2 {
            break;
        }
        let u = rng.gen_range(0..i);
        let mut rest = earlier[u].clone();
        let size = rng.gen_range(1..=(max_clique - 1).min(rest.len() + 1));
        rest.shuffle(rng);
        let mut chosen: Vec<usize> = rest.into_iter().take(size - 1).collect();
        chosen.push(u);
        chosen.sort_unstable();
        for &w in &chosen {
            edges.push((w, i));
        }
        earlier[i] = chosen;
    }
    Graph::new(n, edges)
}

/// Greedy colouring along `order` with a uniform choice among the colours
/// of `0..k` not used by earlier neighbours.
pub fn random_proper_coloring<R: RngCore + ?Sized>(
    g: &Graph,
    k: usize,
    order: &EliminationOrdering,
    rng: &mut R,
) -> Result<Coloring> {
    let lists = ListAssignment::uniform(g.n(), k);
    random_list_coloring(g, &lists, order, rng)
}

/// As [`random_proper_coloring`], drawing from each vertex's list.
pub fn random_list_coloring<R: RngCore + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    order: &EliminationOrdering,
    rng: &mut R,
) -> Result<Coloring> {
    const UNSET: Color = Color::MAX;
    let mut colors = vec![UNSET; g.n()];
    for &v in order.order() {
        let free: Vec<Color> = lists
            .list(v)
            .iter()
            .copied()
            .filter(|&c| g.neighbors(v).iter().all(|&w| colors[w] != c))
            .collect();
        let Some(&c) = free.choose(rng) else {
            let used = g.neighbors(v).iter().filter(|&&w| colors[w] != UNSET).count();
            return Err(Error::NoAdmissibleColor {
                vertex: v,
                k: lists.size(v),
                spare: lists.size(v) as i64 - used as i64,
            });
        };
        colors[v] = c;
    }
    Ok(Coloring::new(colors))
}

/// Random deg+2 lists: the universe is `0..Δ+4` and `|L(v)|` is uniform in
/// `[deg(v) + 2, min(Δ + 4, deg(v) + 4)]`.
pub fn random_deg_plus_two_lists<R: RngCore + ?Sized>(g: &Graph, rng: &mut R) -> ListAssignment {
    let universe: Vec<Color> = (0..(g.max_degree() + 4) as Color).collect();
    let lists = (0..g.n())
        .map(|v| {
            let lo = g.degree(v) + 2;
            let hi = (g.degree(v) + 4).min(universe.len());
            let size = rng.gen_range(lo..=hi);
            let mut pool = universe.clone();
            pool.shuffle(rng);
            pool.truncate(size);
            pool
        })
        .collect();
    ListAssignment::new(lists).expect("lists have at least two colours")
}

#[allow(clippy::needless_range_loop)]
fn pair_index(n: usize) -> Vec<Vec<usize>> {
    let mut idx = vec![vec![usize::MAX; n]; n];
    let mut next = 0;
    for j in 1..n {
        for i in 0..j {
            idx[i][j] = next;
            idx[j][i] = next;
            next += 1;
        }
    }
    idx
}

/// The graph whose edge set is the bitmask `mask` over pairs `(i, j)`,
/// `i < j`, ordered by `j` then `i`.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut edges = Vec::new();
    let mut bit = 0;
    for j in 1..n {
        for i in 0..j {
            if mask >> bit & 1 == 1 {
                edges.push((i, j));
            }
            bit += 1;
        }
    }
    Graph::new(n, edges).expect("mask edges are valid")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn heap(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(p.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, p, out);
            if k.is_multiple_of(2) {
                p.swap(i, k - 1);
            } else {
                p.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut p, &mut out);
    out
}

/// Smallest edge mask over all relabellings; equal iff isomorphic.
fn canonical_mask(g: &Graph, perms: &[Vec<usize>], idx: &[Vec<usize>]) -> u64 {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    perms
        .iter()
        .map(|p| edges.iter().fold(0u64, |m, &(u, v)| m | 1 << idx[p[u]][p[v]]))
        .min()
        .unwrap_or(0)
}

/// One representative of every isomorphism class of graphs on `n ≤ 7`
/// vertices, built by adding a vertex to each class on `n − 1` vertices in
/// every possible way. Sorted by canonical mask, so the order is fixed.
pub fn nonisomorphic_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 7, "exhaustive corpora are limited to 7 vertices");
    if n == 0 {
        return vec![Graph::empty(0)];
    }
    let perms = permutations(n);
    let idx = pair_index(n);
    let mut seen = BTreeSet::new();
    for base in nonisomorphic_graphs(n - 1) {
        let base_edges: Vec<(usize, usize)> = base.edges().collect();
        for nbrs in 0u32..1 << (n - 1) {
            let mut edges = base_edges.clone();
            edges.extend((0..n - 1).filter(|&u| nbrs >> u & 1 == 1).map(|u| (u, n - 1)));
            let g = Graph::new(n, edges).expect("valid edges");
            seen.insert(canonical_mask(&g, &perms, &idx));
        }
    }
    seen.into_iter().map(|m| graph_from_mask(n, m)).collect()
}

/// Every labelled graph on `n` vertices, in mask order.
pub fn all_labelled_graphs(n: usize) -> impl Iterator<Item = Graph> {
    assert!(n <= 10, "2^(n choose 2) labelled graphs");
    let pairs = n * n.saturating_sub(1) / 2;
    (0u64..1 << pairs).map(move |m| graph_from_mask(n, m))
}
