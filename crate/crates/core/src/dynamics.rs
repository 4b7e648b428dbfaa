//! Glauber and Kempe dynamics: step samplers and exact transition matrices.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;
use rand::{Rng, RngCore};

use crate::coloring::{check_no_monochromatic_edge, check_proper, Color, Coloring, ColoringSpace, ListAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrix::{checked_lcm, MatrixBuilder, TransitionMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChainKind {
    Glauber,
    Kempe,
}

impl ChainKind {
    pub fn name(self) -> &'static str {
        match self {
            ChainKind::Glauber => "glauber",
            ChainKind::Kempe => "kempe",
        }
    }
}

/// A transition matrix together with the colouring space indexing it.
#[derive(Clone, Debug)]
pub struct EnumeratedChain {
    pub kind: ChainKind,
    pub space: ColoringSpace,
    pub matrix: TransitionMatrix,
}

impl EnumeratedChain {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// "exact" or "float".
    pub fn mode(&self) -> &'static str {
        if self.matrix.is_exact() {
            "exact"
        } else {
            "float"
        }
    }
}

/// What a single sampler step drew and did.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub vertex: usize,
    pub color: Color,
    pub accepted: bool,
}

/// Recolours `v` with `c` when no neighbour holds `c`; otherwise returns a copy.
pub fn glauber_apply(g: &Graph, sigma: &Coloring, v: usize, c: Color) -> (Coloring, bool) {
    if g.neighbors(v).iter().any(|&w| sigma[w] == c) {
        (sigma.clone(), false)
    } else {
        (sigma.with(v, c), true)
    }
}

/// One Glauber step: a uniform vertex, a uniform colour from its list.
pub fn glauber_step<R: RngCore + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &Coloring,
    rng: &mut R,
) -> Result<Coloring> {
    glauber_step_traced(g, lists, sigma, rng).map(|(next, _)| next)
}

pub fn glauber_step_traced<R: RngCore + ?Sized>(
    g: &Graph,
    lists: &ListAssignment,
    sigma: &Coloring,
    rng: &mut R,
) -> Result<(Coloring, StepRecord)> {
    check_proper(g, lists, sigma)?;
    if g.n() == 0 {
        return Err(Error::Precondition("the graph has no vertices".into()));
    }
    let v = rng.gen_range(0..g.n());
    let list = lists.list(v);
    let c = list[rng.gen_range(0..list.len())];
    let (next, accepted) = glauber_apply(g, sigma, v, c);
    Ok((
        next,
        StepRecord {
            vertex: v,
            color: c,
            accepted: accepted && c != sigma[v],
        },
    ))
}

fn check_space(g: &Graph, lists: &ListAssignment, space: &ColoringSpace) -> Result<()> {
    if space.n() != g.n() || space.lists() != lists {
        return Err(Error::Precondition(
            "colouring space was enumerated for a different instance".into(),
        ));
    }
    Ok(())
}

/// `P[σ → η] = 1/(n|L(v)|)` when `σ`, `η` differ exactly at `v`.
pub fn glauber_matrix(g: &Graph, lists: &ListAssignment, space: &ColoringSpace) -> Result<EnumeratedChain> {
    check_space(g, lists, space)?;
    let n = g.n();
    let denominator = checked_lcm((0..n).map(|v| lists.size(v) as u128)).and_then(|l| l.checked_mul(n as u128));
    let mut b = MatrixBuilder::new(space.len(), denominator);
    let mut buf: Vec<Color> = vec![0; n];
    for i in 0..space.len() {
        let sigma = space.get(i);
        buf.copy_from_slice(sigma);
        for v in 0..n {
            let q = (n * lists.size(v)) as u128;
            for &c in lists.list(v) {
                if c == sigma[v] || g.neighbors(v).iter().any(|&w| sigma[w] == c) {
                    continue;
                }
                buf[v] = c;
                let j = space.index_of(&buf).expect("single-vertex moves stay in the space");
                b.add_unit_fraction(i, j, q);
            }
            buf[v] = sigma[v];
        }
    }
    Ok(EnumeratedChain {
        kind: ChainKind::Glauber,
        space: space.clone(),
        matrix: b.finish(),
    })
}

/// Maximal connected set containing `v` coloured within `{σ(v), c}`, sorted.
/// For `c = σ(v)` this is `{v}`.
pub fn kempe_chain(g: &Graph, sigma: &Coloring, v: usize, c: Color) -> Vec<usize> {
    let a = sigma[v];
    if c == a {
        return vec![v];
    }
    let mut seen = vec![false; g.n()];
    seen[v] = true;
    let mut out = vec![v];
    let mut queue = VecDeque::from([v]);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            if !seen[w] && (sigma[w] == a || sigma[w] == c) {
                seen[w] = true;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Swaps colours `a` and `b` on `chain`.
pub fn kempe_swap(sigma: &Coloring, chain: &[usize], a: Color, b: Color) -> Coloring {
    let mut next = sigma.clone();
    for &u in chain {
        let x = sigma[u];
        next.set(u, if x == a { b } else if x == b { a } else { x });
    }
    next
}

fn check_kempe_input(g: &Graph, k: usize, sigma: &Coloring) -> Result<()> {
    check_proper(g, &ListAssignment::uniform(g.n(), k), sigma)
}

/// One Kempe step: uniform `(v, c) ∈ V × [k]`, then swap the chain with
/// probability `1/|C|`. `c = σ(v)` is the identity exchange.
pub fn kempe_step<R: RngCore + ?Sized>(g: &Graph, k: usize, sigma: &Coloring, rng: &mut R) -> Result<Coloring> {
    kempe_step_traced(g, k, sigma, rng).map(|(next, _)| next)
}

pub fn kempe_step_traced<R: RngCore + ?Sized>(
    g: &Graph,
    k: usize,
    sigma: &Coloring,
    rng: &mut R,
) -> Result<(Coloring, StepRecord)> {
    check_kempe_input(g, k, sigma)?;
    if g.n() == 0 {
        return Err(Error::Precondition("the graph has no vertices".into()));
    }
    let v = rng.gen_range(0..g.n());
    let c = rng.gen_range(0..k) as Color;
    let record = |accepted| StepRecord {
        vertex: v,
        color: c,
        accepted,
    };
    if c == sigma[v] {
        return Ok((sigma.clone(), record(false)));
    }
    let chain = kempe_chain(g, sigma, v, c);
    if rng.gen_range(0..chain.len()) == 0 {
        let next = kempe_swap(sigma, &chain, sigma[v], c);
        debug_assert!(check_no_monochromatic_edge(g, &next).is_ok());
        Ok((next, record(true)))
    } else {
        Ok((sigma.clone(), record(false)))
    }
}

/// One of the `nk` padded slots of `Kem(σ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KempeSlot {
    pub vertex: usize,
    pub color: Color,
    /// `None` for the identity exchange (`c = σ(v)`).
    pub chain: Option<Vec<usize>>,
    /// Probability of performing this slot's exchange, `1/(nk|C|)`.
    pub weight: Ratio<u64>,
}

impl KempeSlot {
    /// Colour pair `(σ(v), c)` swapped by the exchange.
    pub fn colors(&self, sigma: &Coloring) -> (Color, Color) {
        (sigma[self.vertex], self.color)
    }
}

/// All `nk` slots `(v, c)` with their exchange and its probability. The
/// mass not carried by the slots, `1 − Σ weight`, is the empty exchange.
pub fn kem_set(g: &Graph, k: usize, sigma: &Coloring) -> Result<Vec<KempeSlot>> {
    check_kempe_input(g, k, sigma)?;
    let nk = (g.n() * k) as u64;
    let mut slots = Vec::with_capacity(g.n() * k);
    for v in 0..g.n() {
        for c in 0..k as Color {
            if c == sigma[v] {
                slots.push(KempeSlot {
                    vertex: v,
                    color: c,
                    chain: None,
                    weight: Ratio::from_integer(0),
                });
            } else {
                let chain = kempe_chain(g, sigma, v, c);
                let weight = Ratio::new(1, nk * chain.len() as u64);
                slots.push(KempeSlot {
                    vertex: v,
                    color: c,
                    chain: Some(chain),
                    weight,
                });
            }
        }
    }
    Ok(slots)
}

/// `P^Kem(α, β) = Σ 1/(nk|C|)` over slots `(v, c)` whose exchange maps `α` to `β`.
pub fn kempe_matrix(g: &Graph, k: usize, space: &ColoringSpace) -> Result<EnumeratedChain> {
    if space.lists().uniform_k() != Some(k) {
        return Err(Error::NonUniformLists);
    }
    check_space(g, space.lists(), space)?;
    let n = g.n();
    let denominator = checked_lcm(1..=n as u128)
        .and_then(|l| l.checked_mul((n * k) as u128));
    let mut b = MatrixBuilder::new(space.len(), denominator);
    for i in 0..space.len() {
        let sigma = Coloring::new(space.get(i).to_vec());
        for v in 0..n {
            for c in 0..k as Color {
                if c == sigma[v] {
                    continue;
                }
                let chain = kempe_chain(g, &sigma, v, c);
                let next = kempe_swap(&sigma, &chain, sigma[v], c);
                let j = space
                    .index_of(next.as_slice())
                    .expect("Kempe exchanges preserve properness");
                b.add_unit_fraction(i, j, (n * k * chain.len()) as u128);
            }
        }
    }
    Ok(EnumeratedChain {
        kind: ChainKind::Kempe,
        space: space.clone(),
        matrix: b.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{uniform_lists, ENUMERATION_CAP};
    use crate::rng::RngStream;

    fn space(g: &Graph, k: usize) -> ColoringSpace {
        ColoringSpace::enumerate(g, &uniform_lists(g, k), ENUMERATION_CAP).unwrap()
    }

    fn c(v: &[Color]) -> Coloring {
        Coloring::new(v.to_vec())
    }

    #[test]
    fn glauber_apply_examples() {
        let k2 = Graph::complete(2);
        assert_eq!(glauber_apply(&Graph::empty(1), &c(&[0]), 0, 1).0, c(&[1]));
        assert_eq!(glauber_apply(&k2, &c(&[0, 1]), 0, 1), (c(&[0, 1]), false));
        assert_eq!(glauber_apply(&k2, &c(&[0, 1]), 0, 2).0, c(&[2, 1]));
    }

    #[test]
    fn samplers_reject_improper_input() {
        let k2 = Graph::complete(2);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(
            glauber_step(&k2, &uniform_lists(&k2, 3), &c(&[1, 1]), &mut rng),
            Err(Error::MonochromaticEdge(0, 1))
        );
        assert!(kempe_step(&k2, 3, &c(&[1, 1]), &mut rng).is_err());
        assert!(kempe_step(&k2, 3, &c(&[1, 5]), &mut rng).is_err());
    }

    #[test]
    fn glauber_matrix_examples() {
        let k1 = Graph::empty(1);
        let m = glauber_matrix(&k1, &uniform_lists(&k1, 2), &space(&k1, 2)).unwrap().matrix;
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(m.exact_entry(i, j), Some(Ratio::new(1, 2)));
            }
        }

        let k2 = Graph::complete(2);
        let m = glauber_matrix(&k2, &uniform_lists(&k2, 3), &space(&k2, 3)).unwrap().matrix;
        assert_eq!(m.len(), 6);
        for i in 0..6 {
            let off: Vec<_> = (0..6).filter(|&j| j != i && m.get(i, j) > 0.0).collect();
            assert_eq!(off.len(), 2);
            for j in off {
                assert_eq!(m.exact_entry(i, j), Some(Ratio::new(1, 6)));
            }
            assert_eq!(m.exact_entry(i, i), Some(Ratio::new(4, 6)));
        }

        let k3 = Graph::complete(3);
        let m = glauber_matrix(&k3, &uniform_lists(&k3, 3), &space(&k3, 3)).unwrap().matrix;
        for i in 0..6 {
            assert_eq!(m.exact_entry(i, i), Some(Ratio::from_integer(1)));
        }
        assert_eq!(m.support_components().len(), 6);
    }

    #[test]
    fn kempe_chain_examples() {
        let p3 = Graph::path(3);
        assert_eq!(kempe_chain(&p3, &c(&[1, 2, 1]), 0, 2), [0, 1, 2]);
        assert_eq!(kempe_chain(&p3, &c(&[1, 2, 3]), 0, 2), [0, 1]);
        assert_eq!(kempe_chain(&Graph::empty(2), &c(&[0, 0]), 1, 4), [1]);
        assert_eq!(kempe_chain(&p3, &c(&[1, 2, 1]), 1, 2), [1]);
    }

    #[test]
    fn kempe_swap_examples() {
        let p3 = Graph::path(3);
        let s = c(&[1, 2, 1]);
        let chain = kempe_chain(&p3, &s, 0, 2);
        let t = kempe_swap(&s, &chain, 1, 2);
        assert_eq!(t, c(&[2, 1, 2]));
        assert_eq!(kempe_swap(&t, &chain, 1, 2), s);
    }

    #[test]
    fn kempe_step_on_single_vertex_always_swaps() {
        let k1 = Graph::empty(1);
        let mut rng = RngStream::new(5, 0);
        for _ in 0..100 {
            let next = kempe_step(&k1, 2, &c(&[0]), &mut rng).unwrap();
            assert!(next == c(&[0]) || next == c(&[1]));
        }
        // the c = σ(v) draw is the identity; otherwise |C| = 1 means always swap
        let mut rng = RngStream::new(6, 0);
        for _ in 0..100 {
            let (next, rec) = kempe_step_traced(&k1, 2, &c(&[0]), &mut rng).unwrap();
            assert_eq!(rec.accepted, rec.color == 1);
            assert_eq!(next[0], rec.color);
        }
    }

    #[test]
    fn kem_set_examples() {
        let k1 = Graph::empty(1);
        let slots = kem_set(&k1, 2, &c(&[0])).unwrap();
        assert_eq!(slots.len(), 2);
        assert_eq!(slots[0].chain, None);
        assert_eq!(slots[1].chain.as_deref(), Some(&[0][..]));
        assert_eq!(slots[1].weight, Ratio::new(1, 2));

        let k2 = Graph::complete(2);
        let slots = kem_set(&k2, 2, &c(&[0, 1])).unwrap();
        assert_eq!(slots.len(), 4);
        for s in slots.iter().filter(|s| s.chain.is_some()) {
            assert_eq!(s.chain.as_deref(), Some(&[0, 1][..]));
        }

        let k3 = Graph::complete(3);
        let slots = kem_set(&k3, 3, &c(&[0, 1, 2])).unwrap();
        assert_eq!(slots.len(), 9);
        assert!(slots.iter().filter_map(|s| s.chain.as_ref()).all(|ch| ch.len() == 2));
        let total: Ratio<u64> = slots.iter().map(|s| s.weight).sum();
        assert!(total <= Ratio::from_integer(1));
    }

    #[test]
    fn kempe_matrix_examples() {
        let k1 = Graph::empty(1);
        let m = kempe_matrix(&k1, 2, &space(&k1, 2)).unwrap().matrix;
        assert_eq!(m.exact_entry(0, 1), Some(Ratio::new(1, 2)));

        let k3 = Graph::complete(3);
        let chain = kempe_matrix(&k3, 3, &space(&k3, 3)).unwrap();
        assert!(chain.matrix.is_support_connected());
        // each state reaches the 3 colourings obtained by swapping a colour pair
        for i in 0..6 {
            let off = (0..6).filter(|&j| j != i && chain.matrix.get(i, j) > 0.0).count();
            assert_eq!(off, 3);
        }

        // P3, k=2: three slots (v, c ≠ σ(v)), each flipping the whole path
        // (|C| = 3) with weight 1/(6·3)
        let p3 = Graph::path(3);
        let m = kempe_matrix(&p3, 2, &space(&p3, 2)).unwrap().matrix;
        assert_eq!(m.len(), 2);
        assert_eq!(m.exact_entry(0, 1), Some(Ratio::new(3, 6 * 3)));
    }

    #[test]
    fn kempe_matrix_rejects_lists() {
        let k2 = Graph::complete(2);
        let l = ListAssignment::new(vec![vec![0, 1], vec![1, 2]]).unwrap();
        let s = ColoringSpace::enumerate(&k2, &l, ENUMERATION_CAP).unwrap();
        assert_eq!(kempe_matrix(&k2, 2, &s).unwrap_err(), Error::NonUniformLists);
    }
}
