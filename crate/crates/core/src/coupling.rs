//! A coupling of two copies of the Kempe dynamics on a chordal graph,
//! indexed by a perfect elimination ordering.
//!
//! Each distinct Kempe exchange (a chain together with its colour pair) is
//! represented by exactly one of the `nk` slots `(u, c)`: the one where `u` is
//! the earliest chain vertex in the ordering and `c` is the colour it
//! receives. Drawing a slot uniformly and applying its exchange when the slot
//! is live therefore performs every exchange with probability `1/(nk)`, which
//! is the Kempe dynamics. Both copies use the same slot.
//!
//! On a perfect elimination ordering, the part of a chain lying before
//! position `d` is determined by the colouring on those positions (an induced
//! path leaves and re-enters that prefix only through an earlier vertex), so
//! while the copies agree on the first `d` vertices they keep agreeing.

use alloc::vec::Vec;

use rand::{Rng, RngCore};

use crate::chordal::{clique_tree, first_peo_violation, maximum_cardinality_search, EliminationOrdering};
use crate::coloring::{check_proper, Color, Coloring, ColoringSpace, ListAssignment, ENUMERATION_CAP};
use crate::dynamics::{kempe_chain, kempe_swap};
use crate::error::{Error, Result};
use crate::generate::random_proper_coloring;
use crate::graph::Graph;

/// The exchange behind slot `(v, c)` in `sigma`, when the slot is live.
pub fn live_exchange(
    g: &Graph,
    order: &EliminationOrdering,
    sigma: &Coloring,
    v: usize,
    c: Color,
) -> Option<Vec<usize>> {
    if sigma[v] == c {
        return None;
    }
    let chain = kempe_chain(g, sigma, v, c);
    let earliest = chain
        .iter()
        .copied()
        .min_by_key(|&u| order.position(u))
        .expect("chains contain their root");
    (earliest == v).then_some(chain)
}

/// Position of the first vertex, in elimination order, where the colourings
/// differ; `n` when they are equal.
pub fn disagreement_index(order: &EliminationOrdering, x: &Coloring, y: &Coloring) -> usize {
    order
        .order()
        .iter()
        .position(|&v| x[v] != y[v])
        .unwrap_or(order.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SlotClass {
    /// The exchange touches the first `d + 1` vertices, where `d` is the
    /// disagreement index.
    Prefix,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedSlot {
    pub vertex: usize,
    pub color: Color,
    pub class: SlotClass,
    pub x_exchange: Option<Vec<usize>>,
    pub y_exchange: Option<Vec<usize>>,
}

/// Slot `(v, c)` of one copy paired with slot `(v, c)` of the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExchangePairing {
    pub disagreement: usize,
    pub slots: Vec<PairedSlot>,
}

/// Builds the pairing of `Kem(X)` with `Kem(Y)` and checks that exchanges
/// rooted before the disagreement position coincide there.
pub fn pair_exchanges(
    g: &Graph,
    order: &EliminationOrdering,
    x: &Coloring,
    y: &Coloring,
    k: usize,
) -> Result<ExchangePairing> {
    if order.len() != g.n() {
        return Err(Error::NotPermutation(g.n()));
    }
    if let Some(v) = first_peo_violation(g, order) {
        return Err(Error::NotPerfectOrdering(v));
    }
    let lists = ListAssignment::uniform(g.n(), k);
    check_proper(g, &lists, x)?;
    check_proper(g, &lists, y)?;
    let d = disagreement_index(order, x, y);
    let mut slots = Vec::with_capacity(g.n() * k);
    for v in 0..g.n() {
        for c in 0..k as Color {
            let xe = live_exchange(g, order, x, v, c);
            let ye = live_exchange(g, order, y, v, c);
            let p = order.position(v);
            let class = if p <= d { SlotClass::Prefix } else { SlotClass::Other };
            if p < d {
                let prefix = |e: &Option<Vec<usize>>| -> Option<Vec<usize>> {
                    e.as_ref()
                        .map(|ch| ch.iter().copied().filter(|&u| order.position(u) < d).collect())
                };
                assert_eq!(
                    prefix(&xe),
                    prefix(&ye),
                    "paired exchanges rooted at {v} disagree before position {d}"
                );
            }
            slots.push(PairedSlot {
                vertex: v,
                color: c,
                class,
                x_exchange: xe,
                y_exchange: ye,
            });
        }
    }
    Ok(ExchangePairing { disagreement: d, slots })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledState {
    pub x: Coloring,
    pub y: Coloring,
    pub disagreement: usize,
}

impl CoupledState {
    pub fn new(order: &EliminationOrdering, x: Coloring, y: Coloring) -> Self {
        let disagreement = disagreement_index(order, &x, &y);
        Self { x, y, disagreement }
    }

    pub fn coalesced(&self) -> bool {
        self.x == self.y
    }
}

/// Applies the exchange of slot `(v, c)` to both copies.
pub fn coupled_apply(g: &Graph, order: &EliminationOrdering, state: &mut CoupledState, v: usize, c: Color) {
    for sigma in [&mut state.x, &mut state.y] {
        if let Some(chain) = live_exchange(g, order, sigma, v, c) {
            *sigma = kempe_swap(sigma, &chain, sigma[v], c);
        }
    }
    let next = disagreement_index(order, &state.x, &state.y);
    assert!(next >= state.disagreement, "disagreement index decreased");
    state.disagreement = next;
}

/// One coupled step: a uniform slot among the `nk`. Returns the slot drawn.
pub fn coupled_step<R: RngCore + ?Sized>(
    g: &Graph,
    order: &EliminationOrdering,
    state: &mut CoupledState,
    k: usize,
    rng: &mut R,
) -> (usize, Color) {
    let slot = rng.gen_range(0..g.n() * k);
    let (v, c) = (slot / k, (slot % k) as Color);
    coupled_apply(g, order, state, v, c);
    (v, c)
}

/// Elimination ordering, clique number, and the checks `run_coupling` needs.
pub fn coupling_setup(g: &Graph, k: usize) -> Result<(EliminationOrdering, usize)> {
    let (order, chordal) = maximum_cardinality_search(g);
    if !chordal {
        let v = first_peo_violation(g, &order).expect("non-chordal graphs have a violation");
        return Err(Error::NotChordal(v));
    }
    let omega = clique_tree(g)?.bags().iter().map(Vec::len).max().unwrap_or(0);
    if k < omega + 2 {
        return Err(Error::Precondition("the coupling needs k ≥ ω + 2".into()));
    }
    Ok((order, omega))
}

/// Default step budget `100·ω·n²`.
pub fn default_max_steps(n: usize, omega: usize) -> usize {
    100 * omega.max(1) * n * n
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CouplingRun {
    /// Coalescence time; `None` when censored at the step budget.
    pub time: Option<usize>,
    pub steps: usize,
    /// `(step, index)` each time the disagreement index changed, starting
    /// with `(0, initial)`.
    pub index_trace: Vec<(usize, usize)>,
    /// Steps spent at each disagreement index `0..n`.
    pub dwell: Vec<usize>,
    pub final_index: usize,
    pub monotone: bool,
}

/// Runs the coupling from `(x0, y0)` until coalescence or `max_steps`.
pub fn run_coupling<R: RngCore + ?Sized>(
    g: &Graph,
    k: usize,
    x0: &Coloring,
    y0: &Coloring,
    rng: &mut R,
    max_steps: usize,
) -> Result<CouplingRun> {
    let (order, _) = coupling_setup(g, k)?;
    run_coupling_with(g, &order, k, x0, y0, rng, max_steps)
}

/// [`run_coupling`] with a precomputed perfect elimination ordering.
pub fn run_coupling_with<R: RngCore + ?Sized>(
    g: &Graph,
    order: &EliminationOrdering,
    k: usize,
    x0: &Coloring,
    y0: &Coloring,
    rng: &mut R,
    max_steps: usize,
) -> Result<CouplingRun> {
    let lists = ListAssignment::uniform(g.n(), k);
    check_proper(g, &lists, x0)?;
    check_proper(g, &lists, y0)?;
    let n = g.n();
    let mut state = CoupledState::new(order, x0.clone(), y0.clone());
    let mut trace = alloc::vec![(0, state.disagreement)];
    let mut dwell = alloc::vec![0usize; n];
    let mut steps = 0;
    let mut monotone = true;
    while !state.coalesced() && steps < max_steps {
        let before = state.disagreement;
        dwell[before] += 1;
        coupled_step(g, order, &mut state, k, rng);
        steps += 1;
        if state.disagreement != before {
            monotone &= state.disagreement > before;
            trace.push((steps, state.disagreement));
        }
    }
    Ok(CouplingRun {
        time: state.coalesced().then_some(steps),
        steps,
        index_trace: trace,
        dwell,
        final_index: state.disagreement,
        monotone,
    })
}

/// Summary of the replicas run from one start pair.
#[derive(Clone, Debug, PartialEq)]
pub struct StartSummary {
    pub replicas: usize,
    pub censored: usize,
    /// Mean coalescence time, counting censored runs at their budget.
    pub mean: f64,
    pub std_dev: f64,
    /// `mean + 1.96·sd/√R`.
    pub upper95: f64,
}

impl StartSummary {
    pub fn from_runs(runs: &[CouplingRun]) -> Self {
        let r = runs.len();
        let times: Vec<f64> = runs.iter().map(|x| x.time.unwrap_or(x.steps) as f64).collect();
        let mean = if r == 0 { 0.0 } else { times.iter().sum::<f64>() / r as f64 };
        let var = if r > 1 {
            times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (r - 1) as f64
        } else {
            0.0
        };
        let std_dev = libm::sqrt(var);
        let upper95 = if r == 0 {
            0.0
        } else {
            mean + 1.96 * std_dev / libm::sqrt(r as f64)
        };
        Self {
            replicas: r,
            censored: runs.iter().filter(|x| x.time.is_none()).count(),
            mean,
            std_dev,
            upper95,
        }
    }
}

/// `τ_mix ≤ 4·max E[T]` over the start grid, with the replica statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingBound {
    pub starts: Vec<StartSummary>,
    pub max_mean: f64,
    pub max_upper95: f64,
    /// `4·max_mean`.
    pub bound: f64,
    pub censored: usize,
    /// Some replica was censored, so the means are lower bounds.
    pub low_confidence: bool,
}

pub fn coupling_mixing_bound(per_start: &[Vec<CouplingRun>]) -> CouplingBound {
    let starts: Vec<StartSummary> = per_start.iter().map(|r| StartSummary::from_runs(r)).collect();
    let max_mean = starts.iter().map(|s| s.mean).fold(0.0, f64::max);
    let max_upper95 = starts.iter().map(|s| s.upper95).fold(0.0, f64::max);
    let censored = starts.iter().map(|s| s.censored).sum();
    CouplingBound {
        starts,
        max_mean,
        max_upper95,
        bound: 4.0 * max_mean,
        censored,
        low_confidence: censored > 0,
    }
}

/// Largest colouring space for which every ordered pair is used as a start.
pub const FULL_GRID_LIMIT: usize = 50;

/// Start pairs for the mixing bound: all ordered pairs of distinct
/// colourings when there are at most [`FULL_GRID_LIMIT`], otherwise
/// `random_pairs` pairs of random greedy colourings plus one pair built to
/// differ at every vertex.
pub fn start_grid<R: RngCore + ?Sized>(
    g: &Graph,
    k: usize,
    order: &EliminationOrdering,
    random_pairs: usize,
    rng: &mut R,
) -> Result<Vec<(Coloring, Coloring)>> {
    let lists = ListAssignment::uniform(g.n(), k);
    if let Ok(space) = ColoringSpace::enumerate(g, &lists, FULL_GRID_LIMIT.min(ENUMERATION_CAP)) {
        let mut out = Vec::new();
        for i in 0..space.len() {
            for j in 0..space.len() {
                if i != j {
                    out.push((space.coloring(i), space.coloring(j)));
                }
            }
        }
        return Ok(out);
    }
    let mut out = Vec::with_capacity(random_pairs + 1);
    for _ in 0..random_pairs {
        out.push((
            random_proper_coloring(g, k, order, rng)?,
            random_proper_coloring(g, k, order, rng)?,
        ));
    }
    out.push(far_apart_pair(g, k, order, rng)?);
    Ok(out)
}

/// A random colouring `x` and a greedy `y` differing from it everywhere.
pub fn far_apart_pair<R: RngCore + ?Sized>(
    g: &Graph,
    k: usize,
    order: &EliminationOrdering,
    rng: &mut R,
) -> Result<(Coloring, Coloring)> {
    let x = random_proper_coloring(g, k, order, rng)?;
    let lists = ListAssignment::from_raw(
        (0..g.n())
            .map(|v| (0..k as Color).filter(|&c| c != x[v]).collect())
            .collect(),
    );
    let y = crate::generate::random_list_coloring(g, &lists, order, rng)?;
    Ok((x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use alloc::vec;

    fn c(v: &[Color]) -> Coloring {
        Coloring::new(v.to_vec())
    }

    #[test]
    fn identical_copies_pair_identically() {
        let g = Graph::path(3);
        let ord = EliminationOrdering::identity(3);
        let x = c(&[0, 1, 0]);
        let p = pair_exchanges(&g, &ord, &x, &x, 3).unwrap();
        assert_eq!(p.disagreement, 3);
        assert!(p.slots.iter().all(|s| s.x_exchange == s.y_exchange));
        assert_eq!(p.slots.len(), 9);
    }

    #[test]
    fn single_vertex_pairing() {
        let g = Graph::empty(1);
        let ord = EliminationOrdering::identity(1);
        let p = pair_exchanges(&g, &ord, &c(&[0]), &c(&[1]), 2).unwrap();
        assert_eq!(p.slots.len(), 2);
        assert_eq!(p.slots[0].x_exchange, None);
        assert_eq!(p.slots[0].y_exchange.as_deref(), Some(&[0][..]));
        assert_eq!(p.slots[1].x_exchange.as_deref(), Some(&[0][..]));
        assert_eq!(p.slots[1].y_exchange, None);
    }

    #[test]
    fn rejects_imperfect_ordering() {
        let g = Graph::path(3);
        let bad = EliminationOrdering::new(vec![0, 2, 1]).unwrap();
        assert_eq!(
            pair_exchanges(&g, &bad, &c(&[0, 1, 0]), &c(&[0, 1, 0]), 3),
            Err(Error::NotPerfectOrdering(1))
        );
    }

    #[test]
    fn last_vertex_disagreement_on_p3() {
        let g = Graph::path(3);
        let ord = EliminationOrdering::identity(3);
        let (x, y) = (c(&[0, 1, 0]), c(&[0, 1, 2]));
        let p = pair_exchanges(&g, &ord, &x, &y, 4).unwrap();
        assert_eq!(p.disagreement, 2);
        for s in &p.slots {
            let mut state = CoupledState::new(&ord, x.clone(), y.clone());
            coupled_apply(&g, &ord, &mut state, s.vertex, s.color);
            assert_eq!(state.x.as_slice()[..2], state.y.as_slice()[..2]);
        }
        // colour 3 is free next to vertex 1 in both copies: they coalesce
        let mut state = CoupledState::new(&ord, x, y);
        coupled_apply(&g, &ord, &mut state, 2, 3);
        assert!(state.coalesced());
        assert_eq!(state.disagreement, 3);
    }

    #[test]
    fn single_vertex_coalesces_in_one_step() {
        let g = Graph::empty(1);
        for seed in 0..50 {
            let mut rng = RngStream::new(seed, 0);
            let run = run_coupling(&g, 3, &c(&[0]), &c(&[1]), &mut rng, 100).unwrap();
            assert_eq!(run.time, Some(1));
        }
        let mut rng = RngStream::new(0, 0);
        let run = run_coupling(&g, 3, &c(&[1]), &c(&[1]), &mut rng, 100).unwrap();
        assert_eq!(run.time, Some(0));
    }

    #[test]
    fn coupled_runs_are_monotone_and_sticky() {
        let mut rng = RngStream::new(3, 0);
        let g = crate::generate::random_chordal(8, 3, &mut rng).unwrap();
        let (ord, omega) = coupling_setup(&g, 5).unwrap();
        for _ in 0..20 {
            let (x, y) = far_apart_pair(&g, omega + 2, &ord, &mut rng).unwrap();
            let run = run_coupling_with(&g, &ord, omega + 2, &x, &y, &mut rng, 100_000).unwrap();
            assert!(run.monotone);
            assert!(run.time.is_some());
            let mut state = CoupledState::new(&ord, x.clone(), x.clone());
            for _ in 0..200 {
                coupled_step(&g, &ord, &mut state, omega + 2, &mut rng);
                assert!(state.coalesced());
            }
        }
    }

    #[test]
    fn setup_preconditions() {
        assert!(matches!(coupling_setup(&Graph::cycle(4), 6), Err(Error::NotChordal(_))));
        assert!(matches!(coupling_setup(&Graph::complete(3), 4), Err(Error::Precondition(_))));
        assert!(coupling_setup(&Graph::complete(3), 5).is_ok());
    }

    #[test]
    fn bound_summary() {
        let run = |t: Option<usize>| CouplingRun {
            time: t,
            steps: t.unwrap_or(10),
            index_trace: vec![],
            dwell: vec![],
            final_index: 0,
            monotone: true,
        };
        let b = coupling_mixing_bound(&[vec![run(Some(1)), run(Some(3))], vec![run(None)]]);
        assert_eq!(b.max_mean, 10.0);
        assert_eq!(b.bound, 40.0);
        assert!(b.low_confidence);
        assert_eq!(b.starts[0].mean, 2.0);
    }

    #[test]
    fn small_grid_is_exhaustive() {
        let g = Graph::complete(2);
        let mut rng = RngStream::new(1, 0);
        let grid = start_grid(&g, 3, &EliminationOrdering::identity(2), 5, &mut rng).unwrap();
        assert_eq!(grid.len(), 30);
    }
}
