//! Spectral gaps, relaxation times, total variation and exact mixing times.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{deflated_power_iteration, jacobi_eigen, tridiagonal_ql_eigenvalues, DenseMatrix, Eigen};
use crate::matrix::{TransitionMatrix, FLOAT_TOL};

/// Chains up to this size are eigensolved densely.
pub const DENSE_LIMIT: usize = 2000;
/// Chains up to this size use Jacobi (with eigenvectors available); larger
/// dense chains go through Householder reduction and QL.
pub const JACOBI_LIMIT: usize = 200;
/// Eigenvalues within this distance of 1 count towards its multiplicity.
pub const UNIT_TOL: f64 = 1e-9;

const POWER_TOL: f64 = 1e-13;
const POWER_MAX_ITERATIONS: usize = 2_000_000;
/// Per-start step guard for exact mixing times.
pub const MIXING_STEP_GUARD: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Jacobi,
    HouseholderQl,
    PowerDeflation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Jacobi => "jacobi",
            Method::HouseholderQl => "householder-ql",
            Method::PowerDeflation => "power-deflation",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub size: usize,
    /// Largest eigenvalue strictly below 1, if any.
    pub lambda2: Option<f64>,
    pub lambda_min: f64,
    /// Absent for reducible chains and single-state chains.
    pub gap: Option<f64>,
    pub relaxation: Option<f64>,
    pub unit_multiplicity: usize,
    pub ergodic: bool,
    pub method: Method,
    /// `|λ_min| > λ₂`, so the gap is limited by the negative end of the spectrum.
    pub negative_dominated: bool,
}

impl SpectralReport {
    pub fn is_degenerate(&self) -> bool {
        self.size <= 1
    }

    /// `log(4|Ω|)·τ_rel`, natural logarithm.
    pub fn mixing_upper_bound(&self) -> Option<f64> {
        self.relaxation.map(|t| libm::log(4.0 * self.size as f64) * t)
    }

    fn from_eigenvalues(values: &[f64], method: Method, components: usize) -> Self {
        let size = values.len();
        let unit_multiplicity = values.iter().filter(|&&x| x > 1.0 - UNIT_TOL).count();
        debug_assert!(size == 0 || unit_multiplicity >= 1, "stochastic matrices have eigenvalue 1");
        let lambda2 = values.iter().rev().copied().find(|&x| x <= 1.0 - UNIT_TOL);
        let lambda_min = values.first().copied().unwrap_or(1.0);
        let irreducible = unit_multiplicity == 1 && components <= 1;
        let aperiodic = lambda_min > -1.0 + UNIT_TOL;
        let (gap, negative_dominated) = match lambda2 {
            Some(l2) if irreducible => {
                if l2 >= libm::fabs(lambda_min) {
                    (Some(1.0 - l2), false)
                } else {
                    (Some((1.0 - l2).min(1.0 + lambda_min)), true)
                }
            }
            _ => (None, false),
        };
        let relaxation = gap.filter(|&g| g > 0.0).map(|g| 1.0 / g);
        Self {
            size,
            lambda2,
            lambda_min,
            gap,
            relaxation,
            unit_multiplicity: unit_multiplicity.max(components.min(size)),
            ergodic: irreducible && aperiodic,
            method,
            negative_dominated,
        }
    }
}

/// Eigenvalues of a symmetric matrix: Jacobi up to [`JACOBI_LIMIT`],
/// Householder/QL above.
pub fn symmetric_eigenvalues(a: &DenseMatrix) -> Result<(Vec<f64>, Method)> {
    if a.n() <= JACOBI_LIMIT {
        Ok((jacobi_eigen(a, false)?.values, Method::Jacobi))
    } else {
        Ok((tridiagonal_ql_eigenvalues(a)?, Method::HouseholderQl))
    }
}

/// Full eigendecomposition (values and vectors) of a symmetric matrix.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<Eigen> {
    jacobi_eigen(a, true)
}

/// Spectral report of a symmetric stochastic matrix.
pub fn spectral_gap(m: &TransitionMatrix) -> Result<SpectralReport> {
    if !m.is_symmetric(1e-12) {
        return Err(Error::Precondition("spectral_gap expects a symmetric chain".into()));
    }
    let components = m.support_components().len();
    let n = m.len();
    if n <= DENSE_LIMIT {
        let (values, method) = symmetric_eigenvalues(&m.to_dense())?;
        return Ok(SpectralReport::from_eigenvalues(&values, method, components));
    }
    // (P + I)/2 is PSD with top eigenvalue (1 + λ₂)/2 off the constant vector;
    // (I − P)/2 gives (1 − λ_min)/2 likewise.
    let u = 1.0 / libm::sqrt(n as f64);
    let ones = vec![u; n];
    let mut buf = vec![0.0; n];
    let upper = deflated_power_iteration(
        n,
        &ones,
        |x, y| {
            m.apply_right(x, y);
            y.iter_mut().zip(x).for_each(|(a, b)| *a = (*a + b) / 2.0);
        },
        POWER_TOL,
        POWER_MAX_ITERATIONS,
    )?;
    let lower = deflated_power_iteration(
        n,
        &ones,
        |x, y| {
            m.apply_right(x, &mut buf);
            y.iter_mut()
                .zip(x.iter().zip(&buf))
                .for_each(|(a, (b, p))| *a = (b - p) / 2.0);
        },
        POWER_TOL,
        POWER_MAX_ITERATIONS,
    )?;
    let lambda2 = 2.0 * upper - 1.0;
    let lambda_min = (1.0 - 2.0 * lower).min(lambda2);
    let mut values = vec![lambda_min, lambda2];
    if components > 1 {
        values.pop();
        values.extend(core::iter::repeat_n(1.0, components - 1));
    }
    values.push(1.0);
    let mut report = SpectralReport::from_eigenvalues(&values, Method::PowerDeflation, components);
    report.size = n;
    Ok(report)
}

/// Spectral report of a chain reversible with respect to `pi`, through the
/// symmetric similarity transform `D^{1/2} P D^{-1/2}`.
pub fn reversible_gap(p: &DenseMatrix, pi: &[f64]) -> Result<SpectralReport> {
    let n = p.n();
    if pi.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: pi.len(),
        });
    }
    let root: Vec<f64> = pi.iter().map(|&x| libm::sqrt(x)).collect();
    let s = DenseMatrix::from_fn(n, |i, j| root[i] * p.get(i, j) / root[j]);
    if s.max_asymmetry() > 1e-10 {
        return Err(Error::Precondition("chain is not reversible for the given distribution".into()));
    }
    let s = DenseMatrix::from_fn(n, |i, j| (s.get(i, j) + s.get(j, i)) / 2.0);
    let (values, method) = symmetric_eigenvalues(&s)?;
    let components = dense_components(p);
    Ok(SpectralReport::from_eigenvalues(&values, method, components))
}

fn dense_components(p: &DenseMatrix) -> usize {
    let rows = (0..p.n())
        .map(|i| (0..p.n()).filter(|&j| p.get(i, j) > 0.0).map(|j| (j, p.get(i, j))).collect())
        .collect();
    TransitionMatrix::from_rows(rows).support_components().len()
}

/// `½ Σ |μ(x) − ν(x)|`.
pub fn tv_distance(mu: &[f64], nu: &[f64]) -> Result<f64> {
    if mu.len() != nu.len() {
        return Err(Error::LengthMismatch {
            expected: mu.len(),
            got: nu.len(),
        });
    }
    for d in [mu, nu] {
        let total: f64 = d.iter().sum();
        if libm::fabs(total - 1.0) > FLOAT_TOL || d.iter().any(|&x| x < -FLOAT_TOL) {
            return Err(Error::InvalidDistribution);
        }
    }
    Ok(tv_unchecked(mu, nu))
}

fn tv_unchecked(mu: &[f64], nu: &[f64]) -> f64 {
    mu.iter().zip(nu).map(|(a, b)| libm::fabs(a - b)).sum::<f64>() / 2.0
}

fn tv_to_uniform(mu: &[f64]) -> f64 {
    let u = 1.0 / mu.len() as f64;
    mu.iter().map(|a| libm::fabs(a - u)).sum::<f64>() / 2.0
}

fn require_mixing_preconditions(m: &TransitionMatrix) -> Result<()> {
    if !m.is_doubly_stochastic(1e-10) {
        return Err(Error::Precondition("mixing times here assume a uniform stationary distribution".into()));
    }
    let components = m.support_components().len();
    if components > 1 {
        return Err(Error::NonErgodic(components));
    }
    Ok(())
}

/// Least `t` with `max_x TV(P^t(x, ·), π) ≤ threshold`, for a doubly
/// stochastic chain (uniform `π`). The distance from each start is
/// non-increasing in `t`, so the maximum over starts of the per-start
/// hitting times is the answer; the monotonicity is asserted as we go.
pub fn mixing_time_exact(m: &TransitionMatrix, threshold: f64) -> Result<usize> {
    require_mixing_preconditions(m)?;
    let n = m.len();
    let mut worst = 0;
    let mut mu = vec![0.0; n];
    let mut next = vec![0.0; n];
    for x in 0..n {
        mu.iter_mut().for_each(|a| *a = 0.0);
        mu[x] = 1.0;
        let mut tv = tv_to_uniform(&mu);
        let mut t = 0;
        while tv > threshold + FLOAT_TOL {
            if t == MIXING_STEP_GUARD {
                return Err(Error::NoConvergence(t));
            }
            m.apply_left(&mu, &mut next);
            core::mem::swap(&mut mu, &mut next);
            let fresh = tv_to_uniform(&mu);
            assert!(fresh <= tv + 1e-12, "distance to stationarity increased at step {}", t + 1);
            tv = fresh;
            t += 1;
        }
        worst = worst.max(t);
    }
    Ok(worst)
}

/// `max_x TV(P^t(x, ·), π)` for `t = 0..=t_max`.
pub fn worst_case_tv_profile(m: &TransitionMatrix, t_max: usize) -> Result<Vec<f64>> {
    require_mixing_preconditions(m)?;
    let n = m.len();
    let mut profile = vec![0.0f64; t_max + 1];
    let mut mu = vec![0.0; n];
    let mut next = vec![0.0; n];
    for x in 0..n {
        mu.iter_mut().for_each(|a| *a = 0.0);
        mu[x] = 1.0;
        for (t, slot) in profile.iter_mut().enumerate() {
            if t > 0 {
                m.apply_left(&mu, &mut next);
                core::mem::swap(&mut mu, &mut next);
            }
            *slot = slot.max(tv_to_uniform(&mu));
        }
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{uniform_lists, ColoringSpace, ENUMERATION_CAP};
    use crate::dynamics::{glauber_matrix, kempe_matrix};
    use crate::graph::Graph;

    fn glauber(g: &Graph, k: usize) -> TransitionMatrix {
        let l = uniform_lists(g, k);
        let s = ColoringSpace::enumerate(g, &l, ENUMERATION_CAP).unwrap();
        glauber_matrix(g, &l, &s).unwrap().matrix
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), Ok(0.0));
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]), Ok(1.0));
        assert_eq!(tv_distance(&[0.75, 0.25], &[0.25, 0.75]), Ok(0.5));
        assert!(tv_distance(&[1.0], &[0.5, 0.5]).is_err());
        assert_eq!(tv_distance(&[0.5, 0.4], &[0.5, 0.5]), Err(Error::InvalidDistribution));
    }

    #[test]
    fn single_vertex_two_colours() {
        let m = glauber(&Graph::empty(1), 2);
        let r = spectral_gap(&m).unwrap();
        assert!(libm::fabs(r.gap.unwrap() - 1.0) < 1e-12);
        assert!(libm::fabs(r.relaxation.unwrap() - 1.0) < 1e-12);
        assert!(r.ergodic);
        assert_eq!(mixing_time_exact(&m, 0.25), Ok(1));
        assert_eq!(mixing_time_exact(&m, 1.0), Ok(0));
        assert_eq!(worst_case_tv_profile(&m, 1).unwrap(), [0.5, 0.0]);
    }

    #[test]
    fn frozen_triangle() {
        let m = glauber(&Graph::complete(3), 3);
        let r = spectral_gap(&m).unwrap();
        assert_eq!(r.unit_multiplicity, 6);
        assert!(!r.ergodic);
        assert_eq!(r.gap, None);
        assert_eq!(mixing_time_exact(&m, 0.25), Err(Error::NonErgodic(6)));
    }

    #[test]
    fn edge_three_colours() {
        // The 6 colourings of K2 with 3 colours form a 6-cycle under Glauber
        // moves; P = (2/3)I + (1/6)A(C6), so λ₂ = 2/3 + (1/6)·2cos(π/3) = 5/6.
        let m = glauber(&Graph::complete(2), 3);
        let r = spectral_gap(&m).unwrap();
        assert!(libm::fabs(r.gap.unwrap() - 1.0 / 6.0) < 1e-12);
        assert!(libm::fabs(r.lambda_min - (2.0 / 3.0 - 1.0 / 3.0)) < 1e-12);
        // pinned from a dense matrix-power computation: worst-start TV is
        // 0.2672 at t = 5 and 0.2230 at t = 6
        assert_eq!(mixing_time_exact(&m, 0.25), Ok(6));
        let t = mixing_time_exact(&m, 0.25).unwrap() as f64;
        assert!(t <= r.mixing_upper_bound().unwrap());
    }

    #[test]
    fn power_iteration_matches_dense() {
        let g = Graph::path(3);
        let l = uniform_lists(&g, 4);
        let s = ColoringSpace::enumerate(&g, &l, ENUMERATION_CAP).unwrap();
        let m = glauber_matrix(&g, &l, &s).unwrap().matrix;
        let dense = spectral_gap(&m).unwrap();
        let n = m.len();
        let ones = vec![1.0 / libm::sqrt(n as f64); n];
        let top = deflated_power_iteration(
            n,
            &ones,
            |x, y| {
                m.apply_right(x, y);
                y.iter_mut().zip(x).for_each(|(a, b)| *a = (*a + b) / 2.0);
            },
            1e-15,
            1_000_000,
        )
        .unwrap();
        assert!(libm::fabs((2.0 * top - 1.0) - dense.lambda2.unwrap()) < 1e-8);
    }

    #[test]
    fn kempe_triangle_is_ergodic() {
        let g = Graph::complete(3);
        let s = ColoringSpace::enumerate(&g, &uniform_lists(&g, 3), ENUMERATION_CAP).unwrap();
        let m = kempe_matrix(&g, 3, &s).unwrap().matrix;
        let r = spectral_gap(&m).unwrap();
        assert!(r.ergodic);
        assert!(r.gap.unwrap() > 0.0);
    }

    #[test]
    fn reversible_two_state() {
        // π = (1/3, 2/3), P(0→1) = 1/2, P(1→0) = 1/4: eigenvalues 1 and 1/4
        let p = DenseMatrix::from_fn(2, |i, j| [[0.5, 0.5], [0.25, 0.75]][i][j]);
        let r = reversible_gap(&p, &[1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!(libm::fabs(r.lambda2.unwrap() - 0.25) < 1e-12);
        assert!(reversible_gap(&p, &[0.5, 0.5]).is_err());
    }
}
