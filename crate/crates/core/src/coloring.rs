//! List assignments, proper colourings and exhaustive colouring spaces.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Colours are dense small integers.
pub type Color = u32;

/// Default cap on the number of colourings materialised by enumeration.
pub const ENUMERATION_CAP: usize = 200_000;

/// A sorted colour list per vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ListAssignment {
    lists: Vec<Vec<Color>>,
}

impl ListAssignment {
    /// Sorts and deduplicates each list; rejects empty lists.
    pub fn new(lists: Vec<Vec<Color>>) -> Result<Self> {
        if let Some(v) = lists.iter().position(Vec::is_empty) {
            return Err(Error::EmptyList(v));
        }
        Ok(Self::from_raw(lists))
    }

    /// Like [`ListAssignment::new`] but keeps empty lists; restrictions can
    /// legitimately empty a list, which makes the colouring space empty.
    pub fn from_raw(mut lists: Vec<Vec<Color>>) -> Self {
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        Self { lists }
    }

    /// Every list equal to `0..k`.
    pub fn uniform(n: usize, k: usize) -> Self {
        Self {
            lists: vec![(0..k as Color).collect(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, v: usize) -> &[Color] {
        &self.lists[v]
    }

    pub fn lists(&self) -> &[Vec<Color>] {
        &self.lists
    }

    pub fn size(&self, v: usize) -> usize {
        self.lists[v].len()
    }

    pub fn contains(&self, v: usize, c: Color) -> bool {
        self.lists[v].binary_search(&c).is_ok()
    }

    /// `Some(k)` when every list is exactly `0..k`.
    pub fn uniform_k(&self) -> Option<usize> {
        let first = self.lists.first()?;
        let k = first.len();
        let ok = self
            .lists
            .iter()
            .all(|l| l.len() == k && l.iter().enumerate().all(|(i, &c)| c as usize == i));
        ok.then_some(k)
    }

    /// `|L(v)| ≥ deg(v) + 1` everywhere.
    pub fn is_deg_plus_one(&self, g: &Graph) -> bool {
        self.n() == g.n() && (0..g.n()).all(|v| self.size(v) > g.degree(v))
    }

    /// `|L(v)| ≥ deg(v) + 2` everywhere.
    pub fn is_deg_plus_two(&self, g: &Graph) -> bool {
        self.n() == g.n() && (0..g.n()).all(|v| self.size(v) >= g.degree(v) + 2)
    }

    /// One more than the largest colour in any list.
    pub fn palette_size(&self) -> usize {
        self.lists
            .iter()
            .filter_map(|l| l.last())
            .map(|&c| c as usize + 1)
            .max()
            .unwrap_or(0)
    }

    /// Lists of the vertices in `keep`, relabelled in that order.
    pub fn restricted_to(&self, keep: &[usize]) -> Self {
        Self {
            lists: keep.iter().map(|&v| self.lists[v].clone()).collect(),
        }
    }

    /// Copy with colour `c` removed from the lists of `vertices`.
    pub fn without_color_at(&self, vertices: &[usize], c: Color) -> Self {
        let mut lists = self.lists.clone();
        for &v in vertices {
            lists[v].retain(|&x| x != c);
        }
        Self { lists }
    }
}

pub fn uniform_lists(g: &Graph, k: usize) -> ListAssignment {
    ListAssignment::uniform(g.n(), k)
}

/// A total colour assignment. Properness is checked, never assumed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring(Vec<Color>);

impl Coloring {
    pub fn new(colors: Vec<Color>) -> Self {
        Self(colors)
    }

    pub fn as_slice(&self) -> &[Color] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<Color> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> Color {
        self.0[v]
    }

    pub fn set(&mut self, v: usize, c: Color) {
        self.0[v] = c;
    }

    /// Copy with `v` recoloured `c`.
    pub fn with(&self, v: usize, c: Color) -> Self {
        let mut next = self.clone();
        next.0[v] = c;
        next
    }

    pub fn hamming(&self, other: &Coloring) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl From<Vec<Color>> for Coloring {
    fn from(colors: Vec<Color>) -> Self {
        Self(colors)
    }
}

impl core::ops::Index<usize> for Coloring {
    type Output = Color;

    fn index(&self, v: usize) -> &Color {
        &self.0[v]
    }
}

/// List membership and no monochromatic edge.
pub fn is_proper(g: &Graph, lists: &ListAssignment, c: &Coloring) -> bool {
    check_proper(g, lists, c).is_ok()
}

/// [`is_proper`] with the first violation as the error.
pub fn check_proper(g: &Graph, lists: &ListAssignment, c: &Coloring) -> Result<()> {
    if c.len() != g.n() || lists.n() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            got: c.len().min(lists.n()),
        });
    }
    for v in 0..g.n() {
        if !lists.contains(v, c[v]) {
            return Err(Error::ColorNotInList {
                vertex: v,
                color: c[v],
            });
        }
    }
    check_no_monochromatic_edge(g, c)
}

pub(crate) fn check_no_monochromatic_edge(g: &Graph, c: &Coloring) -> Result<()> {
    match g.edges().find(|&(u, v)| c[u] == c[v]) {
        Some((u, v)) => Err(Error::MonochromaticEdge(u, v)),
        None => Ok(()),
    }
}

/// All proper L-colourings of a graph, in lexicographic order (vertex 0 most
/// significant, colours ascending). The order makes state indices stable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoringSpace {
    n: usize,
    lists: ListAssignment,
    flat: Vec<Color>,
}

impl ColoringSpace {
    /// Enumerates by backtracking; fails once more than `cap` colourings exist.
    pub fn enumerate(g: &Graph, lists: &ListAssignment, cap: usize) -> Result<Self> {
        if lists.n() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                got: lists.n(),
            });
        }
        let n = g.n();
        let mut flat = Vec::new();
        let mut current = vec![0 as Color; n];
        let mut count = 0usize;
        fn walk(
            g: &Graph,
            lists: &ListAssignment,
            i: usize,
            current: &mut [Color],
            flat: &mut Vec<Color>,
            count: &mut usize,
            cap: usize,
        ) -> Result<()> {
            if i == current.len() {
                *count += 1;
                if *count > cap {
                    return Err(Error::CapExceeded {
                        what: "colouring space",
                        cap,
                        seen: *count,
                    });
                }
                flat.extend_from_slice(current);
                return Ok(());
            }
            for &c in lists.list(i) {
                if g.neighbors(i).iter().all(|&w| w > i || current[w] != c) {
                    current[i] = c;
                    walk(g, lists, i + 1, current, flat, count, cap)?;
                }
            }
            Ok(())
        }
        walk(g, lists, 0, &mut current, &mut flat, &mut count, cap)?;
        Ok(Self {
            n,
            lists: lists.clone(),
            flat,
        })
    }

    /// Number of colourings.
    pub fn len(&self) -> usize {
        // the empty graph has exactly one (empty) colouring
        self.flat.len().checked_div(self.n).unwrap_or(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lists(&self) -> &ListAssignment {
        &self.lists
    }

    pub fn get(&self, i: usize) -> &[Color] {
        &self.flat[i * self.n..(i + 1) * self.n]
    }

    pub fn coloring(&self, i: usize) -> Coloring {
        Coloring(self.get(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Color]> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }

    /// Index of a colouring, by binary search over the lexicographic order.
    pub fn index_of(&self, colors: &[Color]) -> Option<usize> {
        if colors.len() != self.n {
            return None;
        }
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(colors) {
                core::cmp::Ordering::Less => lo = mid + 1,
                core::cmp::Ordering::Greater => hi = mid,
                core::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// Result of [`enumerate_colorings`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Enumeration {
    Space(ColoringSpace),
    Count(BigUint),
}

/// Materialises `Ω_{G,L}` or, with `count_only`, returns `|Ω_{G,L}|` exactly.
pub fn enumerate_colorings(
    g: &Graph,
    lists: &ListAssignment,
    count_only: bool,
    cap: usize,
) -> Result<Enumeration> {
    if count_only {
        if lists.n() != g.n() {
            return Err(Error::LengthMismatch {
                expected: g.n(),
                got: lists.n(),
            });
        }
        Ok(Enumeration::Count(count_colorings(g, lists)))
    } else {
        ColoringSpace::enumerate(g, lists, cap).map(Enumeration::Space)
    }
}

trait Tally: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    /// `false` on overflow.
    fn accumulate(&mut self, other: &Self) -> bool;
}

impl Tally for u128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn accumulate(&mut self, other: &Self) -> bool {
        match self.checked_add(*other) {
            Some(s) => {
                *self = s;
                true
            }
            None => false,
        }
    }
}

impl Tally for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn accumulate(&mut self, other: &Self) -> bool {
        *self += other;
        true
    }
}

/// `|Ω_{G,L}|`, exactly.
///
/// Vertices are coloured in label order; the count below vertex `i` depends
/// only on the colours of the earlier vertices that still have a neighbour at
/// or after `i`, so partial counts are memoised on that frontier.
pub fn count_colorings(g: &Graph, lists: &ListAssignment) -> BigUint {
    match count_with::<u128>(g, lists) {
        Some(c) => BigUint::from(c),
        None => count_with::<BigUint>(g, lists).expect("big integers do not overflow"),
    }
}

/// Count as `u128`, for callers that know the space is small.
pub fn count_colorings_u128(g: &Graph, lists: &ListAssignment) -> Option<u128> {
    count_with::<u128>(g, lists).or_else(|| count_colorings(g, lists).to_u128())
}

fn count_with<T: Tally>(g: &Graph, lists: &ListAssignment) -> Option<T> {
    let n = g.n();
    let last_neighbor: Vec<usize> = (0..n)
        .map(|v| g.neighbors(v).last().copied().unwrap_or(0))
        .collect();
    let frontier: Vec<Vec<usize>> = (0..=n)
        .map(|i| (0..i).filter(|&j| last_neighbor[j] >= i).collect())
        .collect();
    let mut memo: Vec<BTreeMap<Vec<Color>, T>> = vec![BTreeMap::new(); n + 1];
    let mut current = vec![0 as Color; n];

    fn go<T: Tally>(
        g: &Graph,
        lists: &ListAssignment,
        frontier: &[Vec<usize>],
        memo: &mut [BTreeMap<Vec<Color>, T>],
        current: &mut [Color],
        i: usize,
    ) -> Option<T> {
        if i == current.len() {
            return Some(T::one());
        }
        let key: Vec<Color> = frontier[i].iter().map(|&j| current[j]).collect();
        if let Some(v) = memo[i].get(&key) {
            return Some(v.clone());
        }
        let mut total = T::zero();
        for &c in lists.list(i) {
            if g.neighbors(i).iter().all(|&w| w > i || current[w] != c) {
                current[i] = c;
                let sub = go(g, lists, frontier, memo, current, i + 1)?;
                if !total.accumulate(&sub) {
                    return None;
                }
            }
        }
        memo[i].insert(key, total.clone());
        Some(total)
    }

    go(g, lists, &frontier, &mut memo, &mut current, 0)
}

/// `L^{S,σ}` on `G - S`: each remaining vertex loses the colours `σ` gives its
/// neighbours in `S`. Returns the lists (relabelled in increasing vertex
/// order) and the kept vertices.
pub fn restrict_lists(
    g: &Graph,
    lists: &ListAssignment,
    partial: &[(usize, Color)],
) -> Result<(ListAssignment, Vec<usize>)> {
    let n = g.n();
    let mut assigned: Vec<Option<Color>> = vec![None; n];
    for &(v, c) in partial {
        g.check_vertex(v)?;
        if !lists.contains(v, c) {
            return Err(Error::ColorNotInList { vertex: v, color: c });
        }
        assigned[v] = Some(c);
    }
    for &(v, c) in partial {
        if let Some(&w) = g.neighbors(v).iter().find(|&&w| assigned[w] == Some(c)) {
            return Err(Error::MonochromaticEdge(v.min(w), v.max(w)));
        }
    }
    let keep: Vec<usize> = (0..n).filter(|&v| assigned[v].is_none()).collect();
    let restricted = keep
        .iter()
        .map(|&v| {
            lists
                .list(v)
                .iter()
                .copied()
                .filter(|&c| g.neighbors(v).iter().all(|&w| assigned[w] != Some(c)))
                .collect()
        })
        .collect();
    Ok((ListAssignment::from_raw(restricted), keep))
}
