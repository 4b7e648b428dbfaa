use colorlab_core::coloring::{count_colorings, is_proper, restrict_lists, ENUMERATION_CAP};
use colorlab_core::generate::all_labelled_graphs;
use colorlab_core::{Color, Coloring, ColoringSpace, Graph, ListAssignment};
use num_bigint::BigUint;
use proptest::prelude::*;

/// Chromatic polynomial coefficients by deletion-contraction, on an edge list.
fn chromatic_polynomial(n: usize, edges: &[(usize, usize)]) -> Vec<i64> {
    let Some(&(u, v)) = edges.first() else {
        let mut p = vec![0; n + 1];
        p[n] = 1;
        return p;
    };
    let deleted = chromatic_polynomial(n, &edges[1..]);
    // merge v into u, relabel n-1 onto v
    let relabel = |x: usize| {
        let x = if x == v { u } else { x };
        if x == n - 1 { v } else { x }
    };
    let mut merged: Vec<(usize, usize)> = edges[1..]
        .iter()
        .map(|&(a, b)| (relabel(a), relabel(b)))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    merged.sort_unstable();
    merged.dedup();
    let contracted = chromatic_polynomial(n - 1, &merged);
    let mut p = deleted;
    for (i, c) in contracted.into_iter().enumerate() {
        p[i] -= c;
    }
    p
}

fn evaluate(p: &[i64], k: i64) -> i64 {
    p.iter().rev().fold(0, |acc, &c| acc * k + c)
}

#[test]
fn counts_match_chromatic_polynomial() {
    for n in 1..=5 {
        for g in all_labelled_graphs(n) {
            let edges: Vec<(usize, usize)> = g.edges().collect();
            let p = chromatic_polynomial(n, &edges);
            for k in 1..=4 {
                let expected = evaluate(&p, k as i64);
                let got = count_colorings(&g, &ListAssignment::uniform(n, k));
                assert_eq!(got, BigUint::from(expected as u64), "{g:?} k={k}");
            }
        }
    }
}

fn product_space(lists: &ListAssignment) -> Vec<Vec<Color>> {
    let mut out = vec![Vec::new()];
    for v in 0..lists.n() {
        out = out
            .into_iter()
            .flat_map(|p| {
                lists.list(v).iter().map(move |&c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

#[test]
fn enumeration_is_the_filtered_product_space() {
    let lists = ListAssignment::new(vec![vec![0, 2], vec![0, 1, 2], vec![1, 2], vec![0, 1, 2]]).unwrap();
    for g in all_labelled_graphs(4) {
        let expected: Vec<Vec<Color>> = product_space(&lists)
            .into_iter()
            .filter(|c| is_proper(&g, &lists, &Coloring::new(c.clone())))
            .collect();
        let space = ColoringSpace::enumerate(&g, &lists, ENUMERATION_CAP).unwrap();
        let got: Vec<Vec<Color>> = space.iter().map(|c| c.to_vec()).collect();
        assert_eq!(got, expected);
        assert_eq!(count_colorings(&g, &lists), BigUint::from(expected.len()));
        for (i, c) in expected.iter().enumerate() {
            assert_eq!(space.index_of(c), Some(i));
        }
    }
}

fn arb_instance() -> impl Strategy<Value = (Graph, ListAssignment)> {
    (1usize..7).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(any::<bool>(), pairs),
            proptest::collection::vec(proptest::collection::btree_set(0u32..5, 1..5), n),
        )
            .prop_map(move |(bits, lists)| {
                let edges = (0..n)
                    .flat_map(|j| (0..j).map(move |i| (i, j)))
                    .zip(bits)
                    .filter_map(|(e, b)| b.then_some(e));
                let g = Graph::new(n, edges).unwrap();
                let lists = ListAssignment::new(lists.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap();
                (g, lists)
            })
    })
}

proptest! {
    // Fixing one vertex's colour and summing over its list recovers the total.
    #[test]
    fn restriction_partitions_the_count((g, lists) in arb_instance(), v in 0usize..6) {
        let v = v % g.n();
        let mut total = BigUint::from(0u32);
        for &c in lists.list(v) {
            let (sub_lists, kept) = restrict_lists(&g, &lists, &[(v, c)]).unwrap();
            let (sub, map) = g.without_vertex(v);
            prop_assert_eq!(&kept, &map);
            total += count_colorings(&sub, &sub_lists);
        }
        prop_assert_eq!(total, count_colorings(&g, &lists));
    }

    #[test]
    fn restriction_composes((g, lists) in arb_instance()) {
        prop_assume!(g.n() >= 2);
        let space = ColoringSpace::enumerate(&g, &lists, ENUMERATION_CAP).unwrap();
        prop_assume!(count_colorings(&g, &lists) > BigUint::from(0u32));
        let sigma = space.coloring(0);
        let (l1, kept1) = restrict_lists(&g, &lists, &[(0, sigma[0])]).unwrap();
        let (g1, _) = g.without_vertex(0);
        let (l2, kept2) = restrict_lists(&g1, &l1, &[(0, sigma[1])]).unwrap();
        let (both, kept) = restrict_lists(&g, &lists, &[(0, sigma[0]), (1, sigma[1])]).unwrap();
        prop_assert_eq!(kept2.iter().map(|&i| kept1[i]).collect::<Vec<_>>(), kept);
        prop_assert_eq!(l2, both);
    }
}
