//! Exact checks of the colouring-count inequalities behind the spectral
//! gap argument for the Glauber dynamics.
//!
//! Every quantity is an exact rational; a verdict either holds, is violated,
//! or (for the technical product bound) is vacuous because its hypothesis
//! fails.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

use crate::cliques::{chromatic_number, EXACT_CAP};
use crate::coloring::{count_colorings, Color, ListAssignment};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// `α_χ = 24(χ − 1)`, clamped to `24` for edgeless graphs (`χ ≤ 1`), where
/// the unclamped value would be zero and the bounds below undefined.
pub fn alpha_chi(chi: usize) -> u64 {
    24 * (chi.max(2) as u64 - 1)
}

/// `K = 2^{−6α}/α`.
pub fn good_pair_constant(alpha: u64) -> BigRational {
    let denom = (BigInt::one() << (6 * alpha) as usize) * BigInt::from(alpha);
    BigRational::new(BigInt::one(), denom)
}

/// `C_χ = 2^{−8α²}`, as stated; reported, never used as a checked bound.
pub fn amplification_constant(alpha: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << (8 * alpha * alpha) as usize)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsConstants {
    pub chi: usize,
    pub alpha: u64,
    pub c_chi: BigRational,
    pub k_good: BigRational,
    /// `A = 6α²`.
    pub a_const: u64,
}

impl BoundsConstants {
    pub fn for_chromatic_number(chi: usize) -> Self {
        let alpha = alpha_chi(chi);
        Self {
            chi,
            alpha,
            c_chi: amplification_constant(alpha),
            k_good: good_pair_constant(alpha),
            a_const: 6 * alpha * alpha,
        }
    }

    pub fn for_graph(g: &Graph) -> Result<Self> {
        Ok(Self::for_chromatic_number(exact_chi(g)?))
    }
}

fn exact_chi(g: &Graph) -> Result<usize> {
    if g.n() > EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "vertex count for exact χ",
            cap: EXACT_CAP,
            seen: g.n(),
        });
    }
    Ok(chromatic_number(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    Holds,
    Violated,
    Vacuous,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Violated => "violated",
            Status::Vacuous => "vacuous",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    AtLeast,
    AtMost,
}

/// `lhs ≥ rhs` or `lhs ≤ rhs`, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub relation: Relation,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl Verdict {
    fn compare(lhs: BigRational, relation: Relation, rhs: BigRational) -> Self {
        let ok = match relation {
            Relation::AtLeast => lhs >= rhs,
            Relation::AtMost => lhs <= rhs,
        };
        Self {
            status: if ok { Status::Holds } else { Status::Violated },
            relation,
            lhs,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.status != Status::Violated
    }
}

fn int(x: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(x.into())
}

fn count(g: &Graph, lists: &ListAssignment) -> BigRational {
    int(BigInt::from(count_colorings(g, lists)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TechVerdict {
    pub product: BigRational,
    pub eps_power: BigRational,
    /// `Σ x_i` against `(1 − ε)A`.
    pub verdict: Verdict,
}

/// If `Π(1 − x_i) ≤ ε^A` for `x_i ∈ [0, 1 − ε]` then `Σ x_i ≥ (1 − ε)A`.
pub fn check_tech_bound(a: u64, k: usize, eps: &BigRational, xs: &[BigRational]) -> Result<TechVerdict> {
    let one = BigRational::one();
    if a == 0 || (k as u64) < a {
        return Err(Error::Precondition("need 1 ≤ A ≤ k".into()));
    }
    if *eps <= BigRational::zero() || *eps >= one {
        return Err(Error::Precondition("need 0 < ε < 1".into()));
    }
    if xs.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            got: xs.len(),
        });
    }
    let product = xs.iter().fold(one.clone(), |acc, x| acc * (&one - x));
    let eps_power = Pow::pow(eps, a as u32);
    let sum: BigRational = xs.iter().sum();
    let target = (&one - eps) * int(a);
    let in_range = xs.iter().all(|x| *x >= BigRational::zero() && *x <= &one - eps);
    let mut verdict = Verdict::compare(sum, Relation::AtLeast, target);
    if !in_range || product > eps_power {
        verdict.status = Status::Vacuous;
    }
    Ok(TechVerdict {
        product,
        eps_power,
        verdict,
    })
}

fn require_vertex_and_lists(g: &Graph, lists: &ListAssignment, v: usize) -> Result<()> {
    g.check_vertex(v)?;
    if lists.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: lists.n(),
        });
    }
    Ok(())
}

fn require_deg_plus_two(g: &Graph, lists: &ListAssignment) -> Result<()> {
    if !lists.is_deg_plus_two(g) {
        return Err(Error::Precondition("list assignment is not deg+2".into()));
    }
    Ok(())
}

fn require_color(lists: &ListAssignment, v: usize, c: Color) -> Result<()> {
    if !lists.contains(v, c) {
        return Err(Error::ColorNotInList { vertex: v, color: c });
    }
    Ok(())
}

/// `(G − v, L|_{G−v})`.
fn minus_vertex(g: &Graph, lists: &ListAssignment, v: usize) -> (Graph, ListAssignment) {
    let (h, keep) = g.without_vertex(v);
    (h, lists.restricted_to(&keep))
}

/// `(G − v, L^{v,c})`.
fn minus_vertex_colored(g: &Graph, lists: &ListAssignment, v: usize, c: Color) -> (Graph, ListAssignment) {
    let (h, keep) = g.without_vertex(v);
    (h, lists.without_color_at(g.neighbors(v), c).restricted_to(&keep))
}

/// `|Ω_{G,L}| ≥ max(|L(v)|/α_χ, 2)·|Ω_{G−v,L}|` for a deg+1 assignment with
/// `|L(v)| ≥ deg(v) + 2`.
pub fn verify_lemma_bound_gv(g: &Graph, lists: &ListAssignment, v: usize) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    verify_lemma_bound_gv_with_alpha(g, lists, v, alpha_chi(exact_chi(g)?))
}

pub fn verify_lemma_bound_gv_with_alpha(g: &Graph, lists: &ListAssignment, v: usize, alpha: u64) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    if !lists.is_deg_plus_one(g) {
        return Err(Error::Precondition("list assignment is not deg+1".into()));
    }
    if lists.size(v) < g.degree(v) + 2 {
        return Err(Error::Precondition("|L(v)| < deg(v) + 2 at the chosen vertex".into()));
    }
    let (h, l) = minus_vertex(g, lists, v);
    Ok(lemma_gv_verdict(lists, v, alpha, count(g, lists), &count(&h, &l)))
}

fn lemma_gv_verdict(lists: &ListAssignment, v: usize, alpha: u64, whole: BigRational, rest: &BigRational) -> Verdict {
    let factor = BigRational::new(lists.size(v).into(), alpha.into()).max(int(2));
    Verdict::compare(whole, Relation::AtLeast, factor * rest)
}

/// `|Ω_{G−v,L^{v,c}}| / |Ω_{G,L}| ≤ min(1/2, α_χ/|L(v)|)`: the colour of `v`
/// under the uniform distribution is never too concentrated.
pub fn verify_cor_distrib(g: &Graph, lists: &ListAssignment, v: usize, c: Color) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    verify_cor_distrib_with_alpha(g, lists, v, c, alpha_chi(exact_chi(g)?))
}

pub fn verify_cor_distrib_with_alpha(
    g: &Graph,
    lists: &ListAssignment,
    v: usize,
    c: Color,
    alpha: u64,
) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    require_deg_plus_two(g, lists)?;
    require_color(lists, v, c)?;
    let (h, l) = minus_vertex_colored(g, lists, v, c);
    Ok(cor_distrib_verdict(lists, v, alpha, &count(&h, &l), &count(g, lists)))
}

fn cor_distrib_verdict(lists: &ListAssignment, v: usize, alpha: u64, restricted: &BigRational, whole: &BigRational) -> Verdict {
    let cap = BigRational::new(1.into(), 2.into()).min(BigRational::new(alpha.into(), lists.size(v).into()));
    Verdict::compare(restricted / whole, Relation::AtMost, cap)
}

/// Which denominator the per-neighbour factor uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountLbForm {
    /// `|L(w)|`.
    Statement,
    /// `|L(w) \ c|`.
    Strict,
}

/// `|Ω_{G−v,L^{v,c}}| / |Ω_{G−v,L}| ≥ Π_{w ∈ N(v)} (1 − min(α_χ·[c ∈ L(w)]/|L(w)|, 1/2))`.
pub fn verify_count_lb(g: &Graph, lists: &ListAssignment, v: usize, c: Color, form: CountLbForm) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    verify_count_lb_with_alpha(g, lists, v, c, form, alpha_chi(exact_chi(g)?))
}

pub fn verify_count_lb_with_alpha(
    g: &Graph,
    lists: &ListAssignment,
    v: usize,
    c: Color,
    form: CountLbForm,
    alpha: u64,
) -> Result<Verdict> {
    require_vertex_and_lists(g, lists, v)?;
    require_deg_plus_two(g, lists)?;
    require_color(lists, v, c)?;
    if g.n() < 2 {
        return Err(Error::Precondition("G − v has no vertices".into()));
    }
    let (h, l) = minus_vertex_colored(g, lists, v, c);
    let restricted = count(&h, &l);
    let (h, l) = minus_vertex(g, lists, v);
    Ok(count_lb_verdict(g, lists, v, c, form, alpha, &restricted, &count(&h, &l)))
}

#[allow(clippy::too_many_arguments)]
fn count_lb_verdict(
    g: &Graph,
    lists: &ListAssignment,
    v: usize,
    c: Color,
    form: CountLbForm,
    alpha: u64,
    restricted: &BigRational,
    rest: &BigRational,
) -> Verdict {
    let ratio = restricted / rest;
    let half = BigRational::new(1.into(), 2.into());
    let product = g.neighbors(v).iter().fold(BigRational::one(), |acc, &w| {
        if !lists.contains(w, c) {
            return acc;
        }
        let size = match form {
            CountLbForm::Statement => lists.size(w),
            CountLbForm::Strict => lists.size(w) - 1,
        };
        let term = BigRational::new(alpha.into(), size.into()).min(half.clone());
        acc * (BigRational::one() - term)
    });
    Verdict::compare(ratio, Relation::AtLeast, product)
}

/// Exact counts `|Ω_{G,L}|`, `|Ω_{G−v,L}|`, handy for reports.
pub fn vertex_counts(g: &Graph, lists: &ListAssignment, v: usize) -> (BigUint, BigUint) {
    let (h, l) = minus_vertex(g, lists, v);
    (count_colorings(g, lists), count_colorings(&h, &l))
}

/// `(check name, vertex, colour, verdict)`.
pub type SweepRow = (&'static str, usize, Option<Color>, Verdict);

/// Runs every graph-level check at every vertex (and colour) of one
/// instance.
pub fn sweep_instance(g: &Graph, lists: &ListAssignment) -> Result<Vec<SweepRow>> {
    if lists.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: lists.n(),
        });
    }
    require_deg_plus_two(g, lists)?;
    let alpha = alpha_chi(exact_chi(g)?);
    // each count is shared by several checks
    let whole = count(g, lists);
    let mut rows = Vec::new();
    for v in 0..g.n() {
        let (h, l) = minus_vertex(g, lists, v);
        let rest = count(&h, &l);
        rows.push(("lemma_gv", v, None, lemma_gv_verdict(lists, v, alpha, whole.clone(), &rest)));
        for &c in lists.list(v) {
            let (h, l) = minus_vertex_colored(g, lists, v, c);
            let restricted = count(&h, &l);
            rows.push(("cor_distrib", v, Some(c), cor_distrib_verdict(lists, v, alpha, &restricted, &whole)));
            if g.n() >= 2 {
                for (name, form) in [("count_lb", CountLbForm::Statement), ("count_lb_strict", CountLbForm::Strict)] {
                    let verdict = count_lb_verdict(g, lists, v, c, form, alpha, &restricted, &rest);
                    rows.push((name, v, Some(c), verdict));
                }
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::uniform_lists;
    use alloc::vec;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn constants() {
        let c = BoundsConstants::for_chromatic_number(2);
        assert_eq!(c.alpha, 24);
        assert_eq!(c.a_const, 6 * 24 * 24);
        assert_eq!(c.k_good, BigRational::new(1.into(), (BigInt::one() << 144) * 24));
        assert_eq!(alpha_chi(1), 24);
        assert_eq!(alpha_chi(3), 48);
    }

    #[test]
    fn tech_bound_examples() {
        let t = check_tech_bound(1, 1, &r(1, 2), &[r(1, 2)]).unwrap();
        assert_eq!(t.verdict.status, Status::Holds);
        assert_eq!(t.verdict.lhs, t.verdict.rhs);

        let t = check_tech_bound(2, 3, &r(1, 2), &[r(1, 2), r(1, 2), r(0, 1)]).unwrap();
        assert_eq!(t.product, r(1, 4));
        assert_eq!(t.verdict.status, Status::Holds);
        assert_eq!(t.verdict.lhs, int(1));

        let t = check_tech_bound(2, 3, &r(1, 2), &[r(0, 1), r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(t.verdict.status, Status::Vacuous);

        assert!(check_tech_bound(0, 1, &r(1, 2), &[r(0, 1)]).is_err());
        assert!(check_tech_bound(2, 1, &r(1, 2), &[r(0, 1)]).is_err());
        assert!(check_tech_bound(1, 1, &r(1, 1), &[r(0, 1)]).is_err());
        assert!(check_tech_bound(1, 2, &r(1, 2), &[r(0, 1)]).is_err());
    }

    proptest! {
        #[test]
        fn tech_bound_never_violated(
            a in 1u64..=4,
            extra in 0usize..=4,
            q in 2i64..=12,
            p_frac in 1i64..=11,
            picks in prop::collection::vec((any::<bool>(), 0i64..=12), 8),
        ) {
            let k = a as usize + extra;
            let p = 1 + (p_frac - 1) % (q - 1);
            let eps = r(p, q);
            let top = BigRational::one() - &eps;
            let xs: Vec<BigRational> = picks[..k]
                .iter()
                .map(|&(at_top, s)| if at_top { top.clone() } else { &top * r(s, 12) })
                .collect();
            let t = check_tech_bound(a, k, &eps, &xs).unwrap();
            prop_assert!(t.verdict.holds(), "{:?} {:?}", xs, t);
        }
    }

    #[test]
    fn lemma_gv_examples() {
        let star = Graph::star(3);
        let v = verify_lemma_bound_gv(&star, &uniform_lists(&star, 5), 0).unwrap();
        assert_eq!(v.lhs, int(320));
        assert_eq!(v.rhs, int(250));
        assert_eq!(v.status, Status::Holds);

        let k2 = Graph::complete(2);
        let l = ListAssignment::new(vec![vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        let v = verify_lemma_bound_gv(&k2, &l, 0).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (int(6), int(6)));
        assert!(v.holds());

        let k3 = Graph::complete(3);
        assert!(matches!(
            verify_lemma_bound_gv(&k3, &uniform_lists(&k3, 3), 0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cor_distrib_examples() {
        let k2 = Graph::complete(2);
        let v = verify_cor_distrib(&k2, &uniform_lists(&k2, 3), 0, 1).unwrap();
        assert_eq!(v.lhs, r(1, 3));
        assert!(v.holds());

        let k1 = Graph::empty(1);
        let v = verify_cor_distrib(&k1, &uniform_lists(&k1, 2), 0, 0).unwrap();
        assert_eq!(v.lhs, r(1, 2));
        assert_eq!(v.rhs, r(1, 2));
        assert!(v.holds());

        assert_eq!(
            verify_cor_distrib(&k1, &uniform_lists(&k1, 2), 0, 5),
            Err(Error::ColorNotInList { vertex: 0, color: 5 })
        );
    }

    #[test]
    fn count_lb_examples() {
        let k2 = Graph::complete(2);
        let l = ListAssignment::new(vec![vec![1, 2, 3], vec![1, 2, 3]]).unwrap();
        let v = verify_count_lb(&k2, &l, 0, 1, CountLbForm::Statement).unwrap();
        assert_eq!(v.lhs, r(2, 3));
        assert_eq!(v.rhs, r(1, 2));
        assert!(v.holds());

        let g = Graph::new(3, [(1, 2)]).unwrap();
        let v = verify_count_lb(&g, &uniform_lists(&g, 4), 0, 0, CountLbForm::Statement).unwrap();
        assert_eq!((v.lhs.clone(), v.rhs.clone()), (int(1), int(1)));

        assert!(verify_count_lb(&Graph::empty(1), &uniform_lists(&Graph::empty(1), 2), 0, 0, CountLbForm::Strict).is_err());
    }

    #[test]
    fn sweep_small_instances() {
        for g in [Graph::path(4), Graph::star(3), Graph::complete(3), Graph::cycle(4)] {
            let l = uniform_lists(&g, g.max_degree() + 2);
            for (_, _, _, v) in sweep_instance(&g, &l).unwrap() {
                assert!(v.holds());
            }
        }
    }

    #[test]
    fn sweep_matches_single_checks() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4)]).unwrap();
        let l = ListAssignment::new(vec![vec![0, 1, 2, 3], vec![0, 1, 2, 4], vec![0, 1, 2, 3, 4, 5], vec![1, 2, 3, 4], vec![2, 3, 4]])
            .unwrap();
        let rows = sweep_instance(&g, &l).unwrap();
        assert_eq!(rows.len(), 5 + 3 * 21);
        for (name, v, c, verdict) in rows {
            let single = match (name, c) {
                ("lemma_gv", None) => verify_lemma_bound_gv(&g, &l, v),
                ("cor_distrib", Some(c)) => verify_cor_distrib(&g, &l, v, c),
                ("count_lb", Some(c)) => verify_count_lb(&g, &l, v, c, CountLbForm::Statement),
                ("count_lb_strict", Some(c)) => verify_count_lb(&g, &l, v, c, CountLbForm::Strict),
                other => panic!("unexpected row {other:?}"),
            };
            assert_eq!(single.unwrap(), verdict, "{name} at {v}, {c:?}");
        }
    }
}
