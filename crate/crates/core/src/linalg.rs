//! Dense symmetric eigensolvers and a deflated power iteration.

#![allow(clippy::needless_range_loop)]

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn mul(&self, other: &DenseMatrix) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a != 0.0 {
                    for j in 0..n {
                        out.data[i * n + j] += a * other.data[k * n + j];
                    }
                }
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Frobenius norm of `self - other`.
    pub fn distance(&self, other: &DenseMatrix) -> f64 {
        libm::sqrt(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b) * (a - b))
                .sum(),
        )
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max(libm::fabs(self.get(i, j) - self.get(j, i)));
            }
        }
        worst
    }
}

/// Eigenvalues in ascending order; eigenvectors (if requested) are the
/// columns of `vectors`, in the same order.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Option<DenseMatrix>,
    pub sweeps: usize,
}

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations on a symmetric matrix. Stops when the
/// off-diagonal Frobenius norm drops below `JACOBI_TOL · max(1, ‖A‖_F)`.
pub fn jacobi_eigen(a: &DenseMatrix, want_vectors: bool) -> Result<Eigen> {
    let n = a.n;
    let mut m = a.clone();
    let mut v = want_vectors.then(|| DenseMatrix::identity(n));
    let scale = a.frobenius().max(1.0);
    let mut sweeps = 0;
    loop {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..i {
                off += 2.0 * m.get(i, j) * m.get(i, j);
            }
        }
        if libm::sqrt(off) <= JACOBI_TOL * scale {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence(sweeps));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let theta = (m.get(q, q) - m.get(p, p)) / (2.0 * apq);
                let t = libm::copysign(1.0, theta) / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0));
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                m.set(p, p, m.get(p, p) - t * apq);
                m.set(q, q, m.get(q, q) + t * apq);
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    let np = c * akp - s * akq;
                    let nq = s * akp + c * akq;
                    m.set(k, p, np);
                    m.set(p, k, np);
                    m.set(k, q, nq);
                    m.set(q, k, nq);
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&x, &y| m.get(x, x).total_cmp(&m.get(y, y)));
    let values = idx.iter().map(|&i| m.get(i, i)).collect();
    let vectors = v.map(|v| DenseMatrix::from_fn(n, |r, c| v.get(r, idx[c])));
    Ok(Eigen {
        values,
        vectors,
        sweeps,
    })
}

/// Eigenvalues of a symmetric matrix by Householder reduction to tridiagonal
/// form followed by implicit QL with Wilkinson shifts. Ascending order.
pub fn tridiagonal_ql_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.clone();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| libm::fabs(m.get(i, k))).sum();
            if scale == 0.0 {
                e[i] = m.get(i, l);
            } else {
                for k in 0..=l {
                    let x = m.get(i, k) / scale;
                    m.set(i, k, x);
                    h += x * x;
                }
                let f = m.get(i, l);
                let g = if f >= 0.0 { -libm::sqrt(h) } else { libm::sqrt(h) };
                e[i] = scale * g;
                h -= f * g;
                m.set(i, l, f - g);
                let mut f = 0.0;
                for j in 0..=l {
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += m.get(j, k) * m.get(i, k);
                    }
                    for k in j + 1..=l {
                        g += m.get(k, j) * m.get(i, k);
                    }
                    e[j] = g / h;
                    f += e[j] * m.get(i, j);
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let f = m.get(i, j);
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        let x = m.get(j, k) - (f * e[k] + g * m.get(i, k));
                        m.set(j, k, x);
                    }
                }
            }
        } else {
            e[i] = m.get(i, l);
        }
        d[i] = h;
    }
    for i in 0..n {
        d[i] = m.get(i, i);
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut mm = l;
            while mm + 1 < n {
                let dd = libm::fabs(d[mm]) + libm::fabs(d[mm + 1]);
                if libm::fabs(e[mm]) <= f64::EPSILON * dd {
                    break;
                }
                mm += 1;
            }
            if mm == l {
                break;
            }
            iterations += 1;
            if iterations > 60 {
                return Err(Error::NoConvergence(iterations));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[mm] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..mm).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// Largest eigenvalue of a symmetric operator restricted to the orthogonal
/// complement of `deflate` (a unit vector), by power iteration. The operator
/// must be positive semidefinite so that the top eigenvalue dominates.
pub fn deflated_power_iteration(
    n: usize,
    deflate: &[f64],
    mut apply: impl FnMut(&[f64], &mut [f64]),
    tol: f64,
    max_iterations: usize,
) -> Result<f64> {
    let project = |x: &mut [f64]| {
        let dot: f64 = x.iter().zip(deflate).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(deflate).for_each(|(a, b)| *a -= dot * b);
    };
    let normalise = |x: &mut [f64]| {
        let norm = libm::sqrt(x.iter().map(|a| a * a).sum());
        if norm > 0.0 {
            x.iter_mut().for_each(|a| *a /= norm);
        }
        norm
    };
    // deterministic, non-symmetric start vector
    let mut x: Vec<f64> = (0..n).map(|i| libm::sin(1.0 + i as f64 * 0.7548776662)).collect();
    project(&mut x);
    if normalise(&mut x) == 0.0 {
        return Ok(0.0);
    }
    let mut y = vec![0.0; n];
    let mut previous = f64::INFINITY;
    for it in 0..max_iterations {
        apply(&x, &mut y);
        project(&mut y);
        let rayleigh: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = normalise(&mut y);
        core::mem::swap(&mut x, &mut y);
        if norm == 0.0 {
            return Ok(0.0);
        }
        if it > 10 && libm::fabs(rayleigh - previous) <= tol {
            return Ok(rayleigh);
        }
        previous = rayleigh;
    }
    Err(Error::NoConvergence(max_iterations))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec::Vec;

    fn symmetric_from(entries: &[f64], n: usize) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        let mut it = entries.iter();
        for i in 0..n {
            for j in 0..=i {
                let x = *it.next().unwrap();
                m.set(i, j, x);
                m.set(j, i, x);
            }
        }
        m
    }

    #[test]
    fn two_by_two() {
        let m = DenseMatrix::from_fn(2, |_, _| 0.5);
        let e = jacobi_eigen(&m, true).unwrap();
        assert!(libm::fabs(e.values[0]) < 1e-14);
        assert!(libm::fabs(e.values[1] - 1.0) < 1e-14);
        let q = tridiagonal_ql_eigenvalues(&m).unwrap();
        assert!(libm::fabs(q[1] - 1.0) < 1e-14);
    }

    #[test]
    fn diagonal_is_fixed_point() {
        let m = DenseMatrix::from_fn(3, |i, j| if i == j { [3.0, -1.0, 2.0][i] } else { 0.0 });
        let e = jacobi_eigen(&m, false).unwrap();
        assert_eq!(e.values, [-1.0, 2.0, 3.0]);
        assert_eq!(e.sweeps, 0);
    }

    proptest! {
        #[test]
        fn reconstruction_and_agreement(n in 1usize..12, seed in prop::collection::vec(-1.0f64..1.0, 78)) {
            let m = symmetric_from(&seed, n);
            let e = jacobi_eigen(&m, true).unwrap();
            let q = e.vectors.as_ref().unwrap();
            let lambda = DenseMatrix::from_fn(n, |i, j| if i == j { e.values[i] } else { 0.0 });
            let back = q.mul(&lambda).mul(&q.transpose());
            prop_assert!(back.distance(&m) < 1e-9);
            let ql = tridiagonal_ql_eigenvalues(&m).unwrap();
            for (a, b) in e.values.iter().zip(&ql) {
                prop_assert!(libm::fabs(a - b) < 1e-9, "{:?} vs {:?}", e.values, ql);
            }
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: f64 = ql.iter().sum();
            prop_assert!(libm::fabs(trace - sum) < 1e-9);
        }
    }

    #[test]
    fn power_iteration_finds_second_eigenvalue() {
        // lazy walk on a 4-cycle: eigenvalues 1, 1/2, 1/2, 0
        let n = 4;
        let p = DenseMatrix::from_fn(n, |i, j| {
            if i == j {
                0.5
            } else if (i + 1) % n == j || (j + 1) % n == i {
                0.25
            } else {
                0.0
            }
        });
        let u = 1.0 / libm::sqrt(n as f64);
        let ones: Vec<f64> = vec![u; n];
        let top = deflated_power_iteration(
            n,
            &ones,
            |x, y| {
                for i in 0..n {
                    y[i] = (0..n).map(|j| p.get(i, j) * x[j]).sum();
                }
            },
            1e-14,
            10_000,
        )
        .unwrap();
        assert!(libm::fabs(top - 0.5) < 1e-10);
    }
}
