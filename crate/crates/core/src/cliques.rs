//! Exact clique number and chromatic number for small graphs.

use alloc::vec;
use alloc::vec::Vec;

use crate::chordal::{clique_tree, is_chordal};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Default vertex cap for the exponential-time computations below.
pub const EXACT_CAP: usize = 20;

/// `(ω, χ)` of `g`, exactly. Rejects graphs with more than `cap` vertices.
///
/// For chordal graphs the result is cross-checked against the largest bag of
/// the clique tree (perfect graphs have `ω = χ`).
pub fn clique_and_chromatic_number(g: &Graph, cap: usize) -> Result<(usize, usize)> {
    if g.n() > cap {
        return Err(Error::CapExceeded {
            what: "vertex count for exact ω/χ",
            cap,
            seen: g.n(),
        });
    }
    let omega = clique_number(g);
    let chi = chromatic_number(g);
    if is_chordal(g) {
        let largest = clique_tree(g)?
            .bags()
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0);
        assert_eq!(omega, chi, "chordal graphs are perfect");
        assert_eq!(omega, largest, "largest clique-tree bag is a maximum clique");
    }
    Ok((omega, chi))
}

/// Maximum clique size by branch and bound over candidate sets.
pub fn clique_number(g: &Graph) -> usize {
    fn grow(g: &Graph, size: usize, candidates: Vec<usize>, best: &mut usize) {
        if candidates.is_empty() {
            *best = (*best).max(size);
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            if size + candidates.len() - i <= *best {
                return;
            }
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&w| g.has_edge(v, w))
                .collect();
            grow(g, size + 1, next, best);
        }
    }
    let mut best = 0;
    grow(g, 0, (0..g.n()).collect(), &mut best);
    best
}

/// Smallest `k` for which a proper `k`-colouring exists.
pub fn chromatic_number(g: &Graph) -> usize {
    if g.n() == 0 {
        return 0;
    }
    // colour high-degree vertices first
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| core::cmp::Reverse(g.degree(v)));
    (1..=g.n())
        .find(|&k| is_k_colorable(g, &order, k))
        .expect("n colours always suffice")
}

fn is_k_colorable(g: &Graph, order: &[usize], k: usize) -> bool {
    fn place(g: &Graph, order: &[usize], i: usize, k: usize, colors: &mut [usize], used: usize) -> bool {
        if i == order.len() {
            return true;
        }
        let v = order[i];
        // a fresh colour is interchangeable with any other fresh one
        let limit = (used + 1).min(k);
        for c in 0..limit {
            if g.neighbors(v).iter().all(|&w| colors[w] != c) {
                colors[v] = c;
                if place(g, order, i + 1, k, colors, used.max(c + 1)) {
                    return true;
                }
                colors[v] = usize::MAX;
            }
        }
        false
    }
    let mut colors = vec![usize::MAX; g.n()];
    place(g, order, 0, k, &mut colors, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(clique_and_chromatic_number(&Graph::complete(3), EXACT_CAP), Ok((3, 3)));
        assert_eq!(clique_and_chromatic_number(&Graph::path(4), EXACT_CAP), Ok((2, 2)));
        assert_eq!(clique_and_chromatic_number(&Graph::cycle(5), EXACT_CAP), Ok((2, 3)));
        assert_eq!(clique_and_chromatic_number(&Graph::empty(3), EXACT_CAP), Ok((1, 1)));
    }

    #[test]
    fn c5_has_no_two_colouring() {
        // exhaust all 2^5 assignments
        let g = Graph::cycle(5);
        let proper = (0u32..32)
            .filter(|mask| g.edges().all(|(u, v)| (mask >> u) & 1 != (mask >> v) & 1))
            .count();
        assert_eq!(proper, 0);
    }

    #[test]
    fn cap() {
        assert!(matches!(
            clique_and_chromatic_number(&Graph::empty(21), EXACT_CAP),
            Err(Error::CapExceeded { cap: 20, .. })
        ));
    }

    #[test]
    fn petersen() {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        let g = Graph::new(10, outer.chain(spokes).chain(inner)).unwrap();
        assert_eq!(clique_and_chromatic_number(&g, EXACT_CAP), Ok((2, 3)));
    }
}
