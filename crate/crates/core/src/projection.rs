//! Decomposition of the Glauber chain by the colour of one vertex: the
//! restriction chains on each colour class and the projection chain on the
//! colours themselves.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};

use crate::bounds::{alpha_chi, good_pair_constant};
use crate::cliques::{chromatic_number, EXACT_CAP};
use crate::coloring::{count_colorings, Color, ColoringSpace, ListAssignment, ENUMERATION_CAP};
use crate::dynamics::{glauber_matrix, EnumeratedChain};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::DenseMatrix;
use crate::spectral::{reversible_gap, spectral_gap, SpectralReport};

/// Allowed slack when comparing a gap with its lower bound.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct ColorClass {
    pub color: Color,
    /// `|Ω_c|`, colourings with the chosen vertex coloured `c`.
    pub size: usize,
    /// Gap of the restriction chain; `None` when the class is a single state.
    pub gap: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionRestrictionReport {
    pub vertex: usize,
    pub n: usize,
    pub classes: Vec<ColorClass>,
    /// Smallest restriction gap over non-degenerate classes.
    pub lambda_min: Option<f64>,
    /// Projection chain on `L(v)`, rows and columns in list order.
    pub projection: DenseMatrix,
    pub projection_stationary: Vec<f64>,
    /// Largest entrywise difference between the projection aggregated from
    /// the full matrix and the closed-form counting expression.
    pub projection_formula_deviation: f64,
    pub projection_gap: f64,
    /// Largest probability of leaving one's colour class in a single step.
    pub gamma: Ratio<u128>,
    pub bound: f64,
    pub full: SpectralReport,
    pub full_gap: f64,
}

impl ProjectionRestrictionReport {
    /// `λ ≥ bound` up to [`BOUND_TOL`].
    pub fn bound_holds(&self) -> bool {
        self.full_gap >= self.bound - BOUND_TOL
    }

    /// `γ ≤ 1/n`, exactly.
    pub fn gamma_within_one_over_n(&self) -> bool {
        self.gamma <= Ratio::new(1, self.n as u128)
    }
}

fn require_deg_plus_two(g: &Graph, lists: &ListAssignment, v: usize) -> Result<()> {
    g.check_vertex(v)?;
    if lists.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: lists.n(),
        });
    }
    if !lists.is_deg_plus_two(g) {
        return Err(Error::Precondition("list assignment is not deg+2".into()));
    }
    Ok(())
}

/// Lists of `G − v` when `v` is coloured by every colour in `colors`:
/// neighbours of `v` lose all of them.
fn lists_after_removing(g: &Graph, lists: &ListAssignment, v: usize, colors: &[Color]) -> (Graph, ListAssignment) {
    let (h, keep) = g.without_vertex(v);
    let mut reduced = lists.clone();
    for &c in colors {
        reduced = reduced.without_color_at(g.neighbors(v), c);
    }
    (h, reduced.restricted_to(&keep))
}

/// `|Ω_{G−v, L^{v,c1}} ∩ Ω_{G−v, L^{v,c2}}|`, or `|Ω_{G−v, L^{v,c1}}|` when the
/// colours coincide.
fn class_overlap(g: &Graph, lists: &ListAssignment, v: usize, c1: Color, c2: Color) -> BigUint {
    let (h, l) = lists_after_removing(g, lists, v, &[c1, c2]);
    count_colorings(&h, &l)
}

pub fn projection_restriction(g: &Graph, lists: &ListAssignment, v: usize) -> Result<ProjectionRestrictionReport> {
    require_deg_plus_two(g, lists, v)?;
    let chain = glauber_matrix(g, lists, &ColoringSpace::enumerate(g, lists, ENUMERATION_CAP)?)?;
    let full = spectral_gap(&chain.matrix)?;
    analyse(g, lists, &chain, &full, v)
}

/// [`projection_restriction`] at every vertex, eigensolving the full chain once.
pub fn projection_restriction_all(g: &Graph, lists: &ListAssignment) -> Result<Vec<ProjectionRestrictionReport>> {
    for v in 0..g.n() {
        require_deg_plus_two(g, lists, v)?;
    }
    let chain = glauber_matrix(g, lists, &ColoringSpace::enumerate(g, lists, ENUMERATION_CAP)?)?;
    let full = spectral_gap(&chain.matrix)?;
    (0..g.n()).map(|v| analyse(g, lists, &chain, &full, v)).collect()
}

fn analyse(
    g: &Graph,
    lists: &ListAssignment,
    chain: &EnumeratedChain,
    full: &SpectralReport,
    v: usize,
) -> Result<ProjectionRestrictionReport> {
    let n = g.n();
    let space = &chain.space;
    let full_gap = full.gap.ok_or(Error::NonErgodic(full.unit_multiplicity))?;

    let palette = lists.list(v);
    let m = palette.len();
    let slot = |c: Color| palette.binary_search(&c).expect("colour comes from the list");
    let mut members: Vec<Vec<usize>> = (0..m).map(|_| Vec::new()).collect();
    for i in 0..space.len() {
        members[slot(space.get(i)[v])].push(i);
    }
    if let Some(a) = members.iter().position(Vec::is_empty) {
        return Err(Error::EmptyClass(palette[a]));
    }

    let mut classes = Vec::with_capacity(m);
    for (a, states) in members.iter().enumerate() {
        let gap = if states.len() == 1 {
            None
        } else {
            let r = spectral_gap(&chain.matrix.restricted(states))?;
            Some(r.gap.ok_or(Error::NonErgodic(r.unit_multiplicity))?)
        };
        classes.push(ColorClass {
            color: palette[a],
            size: states.len(),
            gap,
        });
    }
    let lambda_min = classes.iter().filter_map(|c| c.gap).reduce(f64::min);

    // aggregated: P̄[a→b] = (1/|Ω_a|) Σ_{x∈Ω_a} P(x, Ω_b)
    let mut projection = DenseMatrix::zeros(m);
    for (a, states) in members.iter().enumerate() {
        for &x in states {
            for &(y, p) in chain.matrix.row(x) {
                let b = slot(space.get(y)[v]);
                projection.set(a, b, projection.get(a, b) + p);
            }
        }
        for b in 0..m {
            projection.set(a, b, projection.get(a, b) / states.len() as f64);
        }
    }
    let mut deviation: f64 = 0.0;
    for a in 0..m {
        let mut off = 0.0;
        for b in 0..m {
            if a == b {
                continue;
            }
            let overlap = class_overlap(g, lists, v, palette[a], palette[b]).to_f64().unwrap_or(f64::INFINITY);
            let formula = overlap / ((n * m) as f64 * members[a].len() as f64);
            off += formula;
            deviation = deviation.max(libm::fabs(formula - projection.get(a, b)));
        }
        deviation = deviation.max(libm::fabs((1.0 - off) - projection.get(a, a)));
    }
    let total = space.len() as f64;
    let stationary: Vec<f64> = members.iter().map(|s| s.len() as f64 / total).collect();
    let projected = reversible_gap(&projection, &stationary)?;
    let projection_gap = projected
        .gap
        .ok_or(Error::NonErgodic(projected.unit_multiplicity))?;

    // γ: a move leaves the class of x iff it recolours v, with probability
    // (# colours c ≠ x(v) in L(v) free at v) / (n|L(v)|)
    let mut worst_exits = 0usize;
    for i in 0..space.len() {
        let x = space.get(i);
        let exits = palette
            .iter()
            .filter(|&&c| c != x[v] && g.neighbors(v).iter().all(|&w| x[w] != c))
            .count();
        worst_exits = worst_exits.max(exits);
    }
    let gamma = Ratio::new(worst_exits as u128, (n * m) as u128);
    let gamma_f = gamma.to_f64().expect("small ratio");

    let third = projection_gap / 3.0;
    let bound = match lambda_min {
        Some(lm) => third.min(lm * projection_gap / (3.0 * gamma_f + projection_gap)),
        None => third,
    };

    Ok(ProjectionRestrictionReport {
        vertex: v,
        n,
        classes,
        lambda_min,
        projection,
        projection_stationary: stationary,
        projection_formula_deviation: deviation,
        projection_gap,
        gamma,
        bound,
        full: full.clone(),
        full_gap,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionCheck {
    pub color: Color,
    pub restriction_gap: Option<f64>,
    /// Gap of the Glauber dynamics on `(G − v, L^{v,c})`.
    pub subgraph_gap: Option<f64>,
    pub holds: bool,
}

/// Compares each restriction gap with a quarter of the Glauber gap on the
/// graph with `v` removed and lists restricted by `v`'s colour.
pub fn restriction_gap_check(g: &Graph, lists: &ListAssignment, v: usize) -> Result<Vec<RestrictionCheck>> {
    require_deg_plus_two(g, lists, v)?;
    if g.n() < 2 {
        return Err(Error::Precondition("G − v has no vertices".into()));
    }
    let space = ColoringSpace::enumerate(g, lists, ENUMERATION_CAP)?;
    let chain = glauber_matrix(g, lists, &space)?;
    let mut out = Vec::new();
    for &c in lists.list(v) {
        let states: Vec<usize> = (0..space.len()).filter(|&i| space.get(i)[v] == c).collect();
        if states.is_empty() {
            return Err(Error::EmptyClass(c));
        }
        let restriction_gap = if states.len() > 1 {
            spectral_gap(&chain.matrix.restricted(&states))?.gap
        } else {
            None
        };
        let (h, l) = lists_after_removing(g, lists, v, &[c]);
        let sub_space = ColoringSpace::enumerate(&h, &l, ENUMERATION_CAP)?;
        let subgraph_gap = if sub_space.len() > 1 {
            spectral_gap(&glauber_matrix(&h, &l, &sub_space)?.matrix)?.gap
        } else {
            None
        };
        let holds = match (restriction_gap, subgraph_gap) {
            (Some(r), Some(s)) => r >= s / 4.0 - BOUND_TOL,
            (None, None) => true,
            _ => false,
        };
        out.push(RestrictionCheck {
            color: c,
            restriction_gap,
            subgraph_gap,
            holds,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodPair {
    /// `P̄[c1→c2] / π̄(c2)`.
    pub ratio_to_target: BigRational,
    /// `P̄[c1→c2] / π̄(c1)`.
    pub ratio_to_source: BigRational,
    /// `K/n`.
    pub threshold: BigRational,
    pub is_good: bool,
}

/// Exact projection ratios for the pair `(c1, c2)` at `v`, computed by
/// counting rather than enumeration.
pub fn good_pair_ratio(g: &Graph, lists: &ListAssignment, v: usize, c1: Color, c2: Color) -> Result<GoodPair> {
    require_deg_plus_two(g, lists, v)?;
    if c1 == c2 {
        return Err(Error::Precondition("a good pair needs two distinct colours".into()));
    }
    for c in [c1, c2] {
        if !lists.contains(v, c) {
            return Err(Error::ColorNotInList { vertex: v, color: c });
        }
    }
    let n = g.n();
    let m = lists.size(v);
    let class = |c: Color| -> BigInt { class_overlap(g, lists, v, c, c).into() };
    let mut sizes = Vec::with_capacity(m);
    for &c in lists.list(v) {
        let s = class(c);
        if s.is_zero() {
            return Err(Error::EmptyClass(c));
        }
        sizes.push(s);
    }
    let total: BigInt = sizes.iter().sum();
    let size_of = |c: Color| sizes[lists.list(v).binary_search(&c).expect("checked above")].clone();
    let overlap: BigInt = class_overlap(g, lists, v, c1, c2).into();
    let p_bar = BigRational::new(overlap, BigInt::from(n * m) * size_of(c1));
    let pi = |c: Color| BigRational::new(size_of(c), total.clone());
    let ratio_to_target = &p_bar / pi(c2);
    let ratio_to_source = &p_bar / pi(c1);
    let chi = if n <= EXACT_CAP {
        chromatic_number(g)
    } else {
        return Err(Error::CapExceeded {
            what: "vertex count for exact χ",
            cap: EXACT_CAP,
            seen: n,
        });
    };
    let threshold = good_pair_constant(alpha_chi(chi)) / BigRational::from_integer(BigInt::from(n));
    let is_good = ratio_to_target >= threshold;
    Ok(GoodPair {
        ratio_to_target,
        ratio_to_source,
        threshold,
        is_good,
    })
}

/// One-line summary used in diagnostics.
pub fn describe(report: &ProjectionRestrictionReport) -> alloc::string::String {
    format!(
        "v={} gap={:.6} bound={:.6} projection_gap={:.6} gamma={}/{}",
        report.vertex,
        report.full_gap,
        report.bound,
        report.projection_gap,
        report.gamma.numer(),
        report.gamma.denom()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::uniform_lists;

    #[test]
    fn edge_three_colours() {
        let g = Graph::complete(2);
        let r = projection_restriction(&g, &uniform_lists(&g, 3), 0).unwrap();
        for a in 0..3 {
            assert!(libm::fabs(r.projection_stationary[a] - 1.0 / 3.0) < 1e-15);
            for b in 0..3 {
                if a != b {
                    assert!(libm::fabs(r.projection.get(a, b) - 1.0 / 12.0) < 1e-15);
                }
            }
        }
        assert!(r.projection_formula_deviation < 1e-15);
        assert!(r.bound_holds());
        assert!(r.gamma_within_one_over_n());
        // from σ = (a, b): one free colour at v, probability 1/(2·3)
        assert_eq!(r.gamma, Ratio::new(1, 6));
    }

    #[test]
    fn single_vertex_is_all_projection() {
        let g = Graph::empty(1);
        let r = projection_restriction(&g, &uniform_lists(&g, 2), 0).unwrap();
        assert!(r.classes.iter().all(|c| c.gap.is_none() && c.size == 1));
        assert_eq!(r.lambda_min, None);
        assert!(libm::fabs(r.projection.get(0, 1) - 0.5) < 1e-15);
        assert!(libm::fabs(r.projection_gap - r.full_gap) < 1e-12);
        assert!(r.bound_holds());
    }

    #[test]
    fn star_centre() {
        let g = Graph::star(2);
        let r = projection_restriction(&g, &uniform_lists(&g, 4), 0).unwrap();
        assert!(r.bound_holds(), "{}", describe(&r));
        assert!(r.lambda_min.is_some());
    }

    #[test]
    fn rejects_lists_below_deg_plus_two() {
        let g = Graph::complete(3);
        assert!(matches!(
            projection_restriction(&g, &uniform_lists(&g, 3), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn restriction_checks() {
        let g = Graph::complete(2);
        let checks = restriction_gap_check(&g, &uniform_lists(&g, 3), 0).unwrap();
        assert_eq!(checks.len(), 3);
        for c in &checks {
            // restriction: 2 states swapped with probability 1/(2·3);
            // K1 with 2 colours: swapped with probability 1/2
            assert!(libm::fabs(c.restriction_gap.unwrap() - 1.0 / 3.0) < 1e-12);
            assert!(libm::fabs(c.subgraph_gap.unwrap() - 1.0) < 1e-12);
            assert!(c.holds);
        }
        let p3 = Graph::path(3);
        assert!(restriction_gap_check(&p3, &uniform_lists(&p3, 4), 1)
            .unwrap()
            .iter()
            .all(|c| c.holds));
        let k1 = Graph::empty(1);
        assert!(restriction_gap_check(&k1, &uniform_lists(&k1, 2), 0).is_err());
    }

    #[test]
    fn good_pairs() {
        let g = Graph::complete(2);
        let p = good_pair_ratio(&g, &uniform_lists(&g, 3), 0, 0, 1).unwrap();
        assert_eq!(p.ratio_to_target, BigRational::new(1.into(), 4.into()));
        assert!(p.is_good);

        let k3 = Graph::complete(3);
        let l = uniform_lists(&k3, 5);
        for c1 in 0..5 {
            for c2 in 0..5 {
                if c1 != c2 {
                    assert!(good_pair_ratio(&k3, &l, 0, c1, c2).unwrap().is_good);
                }
            }
        }
        assert!(matches!(good_pair_ratio(&g, &uniform_lists(&g, 3), 0, 1, 1), Err(Error::Precondition(_))));
    }
}
