use colorlab_core::chordal::{clique_tree, is_chordal, maximum_cardinality_search, verify_peo};
use colorlab_core::cliques::clique_number;
use colorlab_core::decomposition::{balanced_path_decomposition, validate_tree_decomposition};
use colorlab_core::generate::{all_labelled_graphs, random_chordal};
use colorlab_core::{EliminationOrdering, Graph, RngStream};
use proptest::prelude::*;

/// Chordal iff simplicial vertices can be removed one at a time until nothing is left.
fn chordal_by_elimination(g: &Graph) -> bool {
    let mut alive = vec![true; g.n()];
    for _ in 0..g.n() {
        let simplicial = (0..g.n()).find(|&v| {
            if !alive[v] {
                return false;
            }
            let nb: Vec<usize> = g.neighbors(v).iter().copied().filter(|&w| alive[w]).collect();
            g.is_clique(&nb)
        });
        match simplicial {
            Some(v) => alive[v] = false,
            None => return false,
        }
    }
    true
}

fn has_cycle(g: &Graph) -> bool {
    g.edge_count() + g.components().len() != g.n()
}

#[test]
fn chordality_matches_simplicial_elimination_up_to_seven_vertices() {
    let mut chordal = 0;
    for n in 1..=7 {
        for g in all_labelled_graphs(n) {
            let expected = chordal_by_elimination(&g);
            let (order, perfect) = maximum_cardinality_search(&g);
            assert_eq!(perfect, expected, "{g:?}");
            assert_eq!(is_chordal(&g), expected);
            assert_eq!(verify_peo(&g, &order).unwrap(), expected);
            chordal += expected as usize;
        }
    }
    // labelled chordal graphs on 1..=7 vertices: 1, 2, 8, 61, 822, 18154, 617675
    assert_eq!(chordal, 1 + 2 + 8 + 61 + 822 + 18154 + 617675);
}

#[test]
fn chordality_on_random_eight_vertex_graphs() {
    use rand::Rng;
    let mut rng = RngStream::new(8, 0);
    for _ in 0..3000 {
        let edges: Vec<(usize, usize)> = (0..8)
            .flat_map(|j| (0..j).map(move |i| (i, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let g = Graph::new(8, edges).unwrap();
        assert_eq!(maximum_cardinality_search(&g).1, chordal_by_elimination(&g));
    }
}

#[test]
fn generator_at_clique_size_two_gives_trees() {
    let mut rng = RngStream::new(2, 0);
    for n in 1..40 {
        let g = random_chordal(n, 2, &mut rng).unwrap();
        assert!(!has_cycle(&g));
        assert!(g.is_connected());
    }
    assert_eq!(random_chordal(1, 3, &mut rng).unwrap(), Graph::empty(1));
}

#[test]
fn generated_graphs_pass_recognition() {
    let mut rng = RngStream::new(500, 0);
    for i in 0..500 {
        let n = 1 + i % 25;
        let w = 1 + i % 6;
        let g = random_chordal(n, w, &mut rng).unwrap();
        assert!(maximum_cardinality_search(&g).1);
        assert!(chordal_by_elimination(&g));
        assert!(clique_number(&g) <= w);
    }
}

#[test]
fn balanced_path_decompositions_on_random_chordal_graphs() {
    let mut rng = RngStream::new(31, 0);
    for i in 0..200 {
        let n = 1 + i % 30;
        let g = random_chordal(n, 2 + i % 5, &mut rng).unwrap();
        let ct = clique_tree(&g).unwrap();
        assert!(validate_tree_decomposition(&g, ct.as_decomposition()).is_valid());
        assert_eq!(ct.width() + 1, clique_number(&g));
        let pd = balanced_path_decomposition(&g, &ct).unwrap();
        pd.check(&g, ct.len()).unwrap();
        let limit = (usize::BITS - ct.len().leading_zeros()) as usize;
        assert!(pd.max_parts() <= limit, "{} parts for a tree of {}", pd.max_parts(), ct.len());
    }
}

proptest! {
    #[test]
    fn identity_order_of_generated_graph_is_perfect(seed in any::<u64>(), n in 1usize..20, w in 1usize..6) {
        let g = random_chordal(n, w, &mut RngStream::new(seed, 1)).unwrap();
        prop_assert!(verify_peo(&g, &EliminationOrdering::identity(n)).unwrap());
    }
}
