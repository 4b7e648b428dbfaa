//! Canonical-path comparison of two chains on the same state space, and the
//! construction that simulates one Kempe exchange by single-vertex moves.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::coloring::{check_proper, Color, Coloring, ListAssignment};
use crate::decomposition::{validate_tree_decomposition, PathDecomposition};
use crate::dynamics::{kempe_chain, kempe_swap, EnumeratedChain};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::spectral_gap;

/// Default number of paths emitted per exchange.
pub const BRANCH_CAP: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPath {
    /// State indices, first and last being the endpoints of the transition.
    pub states: Vec<usize>,
    pub weight: Ratio<u64>,
}

impl WeightedPath {
    /// Number of transitions `|γ|`.
    pub fn len(&self) -> usize {
        self.states.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// For each transition `(α, β)` of the reference chain, a weighted family of
/// paths made of transitions of the base chain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathSystem {
    pub families: BTreeMap<(usize, usize), Vec<WeightedPath>>,
    /// Some family was cut off at the branch cap.
    pub truncated: bool,
}

impl PathSystem {
    /// Every off-diagonal transition of `chain` routed along itself.
    pub fn identity(chain: &EnumeratedChain) -> Self {
        let mut families = BTreeMap::new();
        for i in 0..chain.matrix.len() {
            for &(j, p) in chain.matrix.row(i) {
                if i != j && p > 0.0 {
                    families.insert(
                        (i, j),
                        vec![WeightedPath {
                            states: vec![i, j],
                            weight: Ratio::from_integer(1),
                        }],
                    );
                }
            }
        }
        Self {
            families,
            truncated: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CongestionReport {
    pub max_rho: f64,
    /// `(σ, η, ρ_{σ,η})` for every base transition carrying load, sorted by
    /// state pair.
    pub table: Vec<(usize, usize, f64)>,
    pub base_relaxation: Option<f64>,
    pub reference_relaxation: Option<f64>,
    pub truncated: bool,
}

impl CongestionReport {
    /// `τ_rel(base) ≤ τ_rel(reference)·max ρ` up to `1e-9`, when both are defined.
    pub fn bound_holds(&self) -> Option<bool> {
        let (b, r) = (self.base_relaxation?, self.reference_relaxation?);
        Some(b <= r * self.max_rho + 1e-9)
    }
}

/// Congestion of `paths` (made of `base` transitions) simulating every
/// transition of `reference`. Both chains are symmetric, so the uniform
/// stationary weights cancel:
/// `ρ_{σ,η} = Σ g(γ)|γ| P_ref(α,β) / P_base(σ,η)` over paths through `(σ, η)`.
pub fn congestion(base: &EnumeratedChain, reference: &EnumeratedChain, paths: &PathSystem) -> Result<CongestionReport> {
    if base.space != reference.space {
        return Err(Error::Precondition("chains must share a state space".into()));
    }
    let mut load: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for from in 0..reference.matrix.len() {
        for &(to, p_ref) in reference.matrix.row(from) {
            if from == to || p_ref <= 0.0 {
                continue;
            }
            let family = paths.families.get(&(from, to)).map(Vec::as_slice).unwrap_or(&[]);
            let total: Ratio<u64> = family.iter().map(|p| p.weight).sum();
            if total < Ratio::from_integer(1) {
                return Err(Error::WeightDeficit { from, to });
            }
            for path in family {
                if path.states.first() != Some(&from) || path.states.last() != Some(&to) {
                    return Err(Error::InvalidPathStep { from, to });
                }
                let w = *path.weight.numer() as f64 / *path.weight.denom() as f64;
                let contribution = w * path.len() as f64 * p_ref;
                for step in path.states.windows(2) {
                    if step[0] == step[1] || base.matrix.get(step[0], step[1]) <= 0.0 {
                        return Err(Error::InvalidPathStep {
                            from: step[0],
                            to: step[1],
                        });
                    }
                    *load.entry((step[0], step[1])).or_insert(0.0) += contribution;
                }
            }
        }
    }
    let table: Vec<(usize, usize, f64)> = load
        .into_iter()
        .map(|((s, e), l)| (s, e, l / base.matrix.get(s, e)))
        .collect();
    let max_rho = table.iter().map(|x| x.2).fold(0.0, f64::max);
    let base_relaxation = spectral_gap(&base.matrix)?.relaxation;
    let reference_relaxation = spectral_gap(&reference.matrix)?.relaxation;
    Ok(CongestionReport {
        max_rho,
        table,
        base_relaxation,
        reference_relaxation,
        truncated: paths.truncated,
    })
}

/// The same chain slowed down: every off-diagonal entry multiplied by `num/den`.
pub fn slowed(chain: &EnumeratedChain, num: u128, den: u128) -> EnumeratedChain {
    EnumeratedChain {
        kind: chain.kind,
        space: chain.space.clone(),
        matrix: chain.matrix.scale_off_diagonal(num, den),
    }
}

/// A sequence of single-vertex recolourings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GlauberPath {
    pub moves: Vec<(usize, Color)>,
}

impl GlauberPath {
    /// Colourings visited, starting with `start`.
    pub fn states(&self, start: &Coloring) -> Vec<Coloring> {
        let mut out = Vec::with_capacity(self.moves.len() + 1);
        out.push(start.clone());
        let mut cur = start.clone();
        for &(v, c) in &self.moves {
            cur.set(v, c);
            out.push(cur.clone());
        }
        out
    }
}

/// Paths simulating the Kempe exchange `α → β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathFamily {
    /// The Kempe chain on which `α` and `β` differ, sorted.
    pub chain: Vec<usize>,
    pub paths: Vec<GlauberPath>,
    pub truncated: bool,
}

impl PathFamily {
    /// Uniform weight over the emitted paths.
    pub fn weight(&self) -> Ratio<u64> {
        Ratio::new(1, self.paths.len() as u64)
    }
}

/// The Kempe chain `C` with `β = α` swapped on `C`, if there is one.
pub fn exchange_between(g: &Graph, alpha: &Coloring, beta: &Coloring) -> Result<Vec<usize>> {
    let differ: Vec<usize> = (0..g.n()).filter(|&v| alpha[v] != beta[v]).collect();
    let Some(&v0) = differ.first() else {
        return Err(Error::NotKempeExchange);
    };
    let (a, b) = (alpha[v0], beta[v0]);
    let chain = kempe_chain(g, alpha, v0, b);
    if chain != differ || kempe_swap(alpha, &chain, a, b) != *beta {
        return Err(Error::NotKempeExchange);
    }
    Ok(chain)
}

/// Simulates the Kempe exchange `α → β` by Glauber moves, sweeping the bags
/// of a path decomposition. At bag `i`, chain vertices whose interval starts
/// at `i` first move to some colour other than their `α` colour (every
/// admissible choice is branched on, in ascending order, up to
/// `branch_cap` paths); then chain vertices whose interval ends at `i` move
/// to their `β` colour.
pub fn kempe_to_glauber_paths(
    g: &Graph,
    k: usize,
    pd: &PathDecomposition,
    alpha: &Coloring,
    beta: &Coloring,
    branch_cap: usize,
) -> Result<PathFamily> {
    let lists = ListAssignment::uniform(g.n(), k);
    check_proper(g, &lists, alpha)?;
    check_proper(g, &lists, beta)?;
    let diagnosis = validate_tree_decomposition(g, &pd.as_tree_decomposition());
    if !diagnosis.is_valid() {
        return Err(Error::InvalidDecomposition(format!("{diagnosis:?}")));
    }
    let chain = exchange_between(g, alpha, beta)?;
    // the schedule: (vertex, is_detour) in sweep order
    let mut schedule = Vec::with_capacity(2 * chain.len());
    for i in 0..pd.len() {
        schedule.extend(chain.iter().filter(|&&v| pd.start(v) == i).map(|&v| (v, true)));
        schedule.extend(chain.iter().filter(|&&v| pd.end(v) == i).map(|&v| (v, false)));
    }

    struct Search<'a> {
        g: &'a Graph,
        k: usize,
        alpha: &'a Coloring,
        beta: &'a Coloring,
        schedule: &'a [(usize, bool)],
        cap: usize,
        out: Vec<GlauberPath>,
        truncated: bool,
    }

    impl Search<'_> {
        fn free(&self, cur: &Coloring, v: usize, c: Color) -> bool {
            self.g.neighbors(v).iter().all(|&w| cur[w] != c)
        }

        fn walk(&mut self, step: usize, cur: &mut Coloring, moves: &mut Vec<(usize, Color)>) -> Result<()> {
            if self.out.len() == self.cap {
                self.truncated = true;
                return Ok(());
            }
            let Some(&(v, detour)) = self.schedule.get(step) else {
                self.out.push(GlauberPath { moves: moves.clone() });
                return Ok(());
            };
            let old = cur[v];
            if detour {
                let choices: Vec<Color> = (0..self.k as Color)
                    .filter(|&c| c != self.alpha[v] && self.free(cur, v, c))
                    .collect();
                if choices.is_empty() {
                    let blocked = self.g.neighbors(v).len() as i64 + 1;
                    return Err(Error::NoAdmissibleColor {
                        vertex: v,
                        k: self.k,
                        spare: self.k as i64 - blocked,
                    });
                }
                for c in choices {
                    cur.set(v, c);
                    moves.push((v, c));
                    self.walk(step + 1, cur, moves)?;
                    moves.pop();
                    cur.set(v, old);
                    if self.truncated {
                        break;
                    }
                }
                Ok(())
            } else {
                let target = self.beta[v];
                if old == target {
                    return self.walk(step + 1, cur, moves);
                }
                debug_assert!(self.free(cur, v, target), "target colour is free once all chain neighbours have moved");
                cur.set(v, target);
                moves.push((v, target));
                let r = self.walk(step + 1, cur, moves);
                moves.pop();
                cur.set(v, old);
                r
            }
        }
    }

    let mut search = Search {
        g,
        k,
        alpha,
        beta,
        schedule: &schedule,
        cap: branch_cap.max(1),
        out: Vec::new(),
        truncated: false,
    };
    search.walk(0, &mut alpha.clone(), &mut Vec::new())?;
    let Search { out, truncated, .. } = search;
    Ok(PathFamily {
        chain,
        paths: out,
        truncated,
    })
}

/// Replays `path` from `α` and checks that it is a sequence of proper
/// single-vertex recolourings ending at `β`, touching only `chain`, and
/// recolouring each vertex at most twice.
pub fn validate_glauber_path(
    g: &Graph,
    k: usize,
    alpha: &Coloring,
    beta: &Coloring,
    chain: &[usize],
    path: &GlauberPath,
) -> Result<()> {
    let mut cur = alpha.clone();
    let mut times = vec![0usize; g.n()];
    for &(v, c) in &path.moves {
        let bad = || Error::InvalidPathStep { from: v, to: c as usize };
        if chain.binary_search(&v).is_err() || c as usize >= k || cur[v] == c {
            return Err(bad());
        }
        if g.neighbors(v).iter().any(|&w| cur[w] == c) {
            return Err(bad());
        }
        times[v] += 1;
        if times[v] > 2 {
            return Err(bad());
        }
        cur.set(v, c);
    }
    if cur != *beta {
        return Err(Error::InvalidPathStep {
            from: usize::MAX,
            to: usize::MAX,
        });
    }
    Ok(())
}

/// Kempe-to-Glauber paths for every Kempe transition of `kempe`, as state
/// indices of the shared space.
pub fn kempe_path_system(
    g: &Graph,
    k: usize,
    pd: &PathDecomposition,
    kempe: &EnumeratedChain,
    branch_cap: usize,
) -> Result<PathSystem> {
    let space = &kempe.space;
    let mut system = PathSystem::default();
    for from in 0..kempe.matrix.len() {
        let alpha = space.coloring(from);
        for &(to, p) in kempe.matrix.row(from) {
            if from == to || p <= 0.0 {
                continue;
            }
            let beta = space.coloring(to);
            let family = kempe_to_glauber_paths(g, k, pd, &alpha, &beta, branch_cap)?;
            system.truncated |= family.truncated;
            let weight = family.weight();
            let paths = family
                .paths
                .iter()
                .map(|path| WeightedPath {
                    states: path
                        .states(&alpha)
                        .iter()
                        .map(|s| space.index_of(s.as_slice()).expect("paths stay proper"))
                        .collect(),
                    weight,
                })
                .collect();
            system.families.insert((from, to), paths);
        }
    }
    Ok(system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chordal::clique_tree;
    use crate::coloring::{uniform_lists, ColoringSpace, ENUMERATION_CAP};
    use crate::decomposition::balanced_path_decomposition;
    use crate::dynamics::{glauber_matrix, kempe_matrix};

    fn c(v: &[Color]) -> Coloring {
        Coloring::new(v.to_vec())
    }

    fn pd(g: &Graph) -> PathDecomposition {
        balanced_path_decomposition(g, &clique_tree(g).unwrap()).unwrap()
    }

    fn chains(g: &Graph, k: usize) -> (EnumeratedChain, EnumeratedChain) {
        let l = uniform_lists(g, k);
        let s = ColoringSpace::enumerate(g, &l, ENUMERATION_CAP).unwrap();
        (glauber_matrix(g, &l, &s).unwrap(), kempe_matrix(g, k, &s).unwrap())
    }

    #[test]
    fn identity_paths_have_unit_congestion() {
        let (glauber, _) = chains(&Graph::path(3), 3);
        let r = congestion(&glauber, &glauber, &PathSystem::identity(&glauber)).unwrap();
        assert!(r.table.iter().all(|x| libm::fabs(x.2 - 1.0) < 1e-15));
        assert_eq!(r.bound_holds(), Some(true));
    }

    #[test]
    fn halved_chain_congestion_is_two() {
        let (glauber, _) = chains(&Graph::path(3), 4);
        let half = slowed(&glauber, 1, 2);
        let r = congestion(&half, &glauber, &PathSystem::identity(&glauber)).unwrap();
        assert_eq!(r.max_rho, 2.0);
        assert_eq!(r.bound_holds(), Some(true));
    }

    #[test]
    fn missing_paths_are_a_deficit() {
        let (glauber, kempe) = chains(&Graph::path(3), 4);
        let e = congestion(&glauber, &kempe, &PathSystem::default()).unwrap_err();
        assert!(matches!(e, Error::WeightDeficit { .. }));
    }

    #[test]
    fn path_on_p3() {
        let g = Graph::path(3);
        let alpha = c(&[1, 2, 1]);
        let beta = c(&[2, 1, 2]);
        let fam = kempe_to_glauber_paths(&g, 4, &pd(&g), &alpha, &beta, BRANCH_CAP).unwrap();
        assert_eq!(fam.chain, [0, 1, 2]);
        assert!(!fam.paths.is_empty());
        for p in &fam.paths {
            validate_glauber_path(&g, 4, &alpha, &beta, &fam.chain, p).unwrap();
        }
    }

    #[test]
    fn single_vertex_exchange() {
        let g = Graph::path(3);
        let alpha = c(&[0, 1, 0]);
        let beta = c(&[0, 1, 2]);
        let fam = kempe_to_glauber_paths(&g, 4, &pd(&g), &alpha, &beta, BRANCH_CAP).unwrap();
        assert_eq!(fam.chain, [2]);
        assert!(fam.paths.iter().all(|p| (1..=2).contains(&p.moves.len())));
        // detouring straight to the target gives the length-one path
        assert!(fam.paths.iter().any(|p| p.moves == [(2, 2)]));
    }

    #[test]
    fn rejections() {
        let g = Graph::path(3);
        let alpha = c(&[1, 2, 1]);
        assert_eq!(
            kempe_to_glauber_paths(&g, 4, &pd(&g), &alpha, &alpha, BRANCH_CAP),
            Err(Error::NotKempeExchange)
        );
        // two independent single-vertex changes are not one exchange
        let beta = c(&[3, 2, 3]);
        assert_eq!(
            kempe_to_glauber_paths(&g, 4, &pd(&g), &alpha, &beta, BRANCH_CAP),
            Err(Error::NotKempeExchange)
        );
        // with k = 2 there is no spare colour for a detour
        let e = kempe_to_glauber_paths(&g, 2, &pd(&g), &c(&[0, 1, 0]), &c(&[1, 0, 1]), BRANCH_CAP);
        assert!(matches!(e, Err(Error::NoAdmissibleColor { .. })));
    }

    #[test]
    fn kempe_versus_glauber_on_p3() {
        let g = Graph::path(3);
        let (glauber, kempe) = chains(&g, 4);
        let system = kempe_path_system(&g, 4, &pd(&g), &kempe, BRANCH_CAP).unwrap();
        let r = congestion(&glauber, &kempe, &system).unwrap();
        assert!(r.max_rho.is_finite() && r.max_rho >= 1.0);
        assert_eq!(r.bound_holds(), Some(true));
    }
}
