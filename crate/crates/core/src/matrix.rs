//! Sparse row-stochastic matrices with an optional exact rational form.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_rational::Ratio;

use crate::linalg::DenseMatrix;

/// Tolerance for float-mode stochasticity and symmetry checks.
pub const FLOAT_TOL: f64 = 1e-12;

/// Exact entries sharing one denominator. Row `i` of `numerators` has the
/// same sparsity pattern as row `i` of the float form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRows {
    pub denominator: u128,
    pub numerators: Vec<Vec<(usize, u128)>>,
}

/// Row-stochastic matrix stored as sorted sparse rows (diagonal included
/// when nonzero).
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    rows: Vec<Vec<(usize, f64)>>,
    exact: Option<ExactRows>,
}

/// Accumulates off-diagonal unit fractions `1/q`; the diagonal is filled in
/// by [`MatrixBuilder::finish`].
#[derive(Clone, Debug)]
pub struct MatrixBuilder {
    size: usize,
    denominator: Option<u128>,
    exact: Vec<BTreeMap<usize, u128>>,
    float: Vec<BTreeMap<usize, f64>>,
}

impl MatrixBuilder {
    /// `denominator` must be a common multiple of every `q` passed to
    /// [`MatrixBuilder::add_unit_fraction`]; `None` selects float mode.
    pub fn new(size: usize, denominator: Option<u128>) -> Self {
        Self {
            size,
            denominator,
            exact: vec![BTreeMap::new(); size],
            float: vec![BTreeMap::new(); size],
        }
    }

    pub fn add_unit_fraction(&mut self, from: usize, to: usize, q: u128) {
        debug_assert!(from != to, "the diagonal is implied");
        if let Some(d) = self.denominator {
            assert!(d % q == 0, "denominator {d} is not a multiple of {q}");
            *self.exact[from].entry(to).or_insert(0) += d / q;
        } else {
            *self.float[from].entry(to).or_insert(0.0) += 1.0 / q as f64;
        }
    }

    pub fn finish(self) -> TransitionMatrix {
        match self.denominator {
            Some(d) => {
                let numerators = self
                    .exact
                    .into_iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let off: u128 = row.values().sum();
                        assert!(off <= d, "row {i} has off-diagonal mass above 1");
                        let mut row: Vec<(usize, u128)> = row.into_iter().collect();
                        if off < d {
                            row.push((i, d - off));
                            row.sort_unstable_by_key(|e| e.0);
                        }
                        row
                    })
                    .collect();
                TransitionMatrix::from_exact(ExactRows {
                    denominator: d,
                    numerators,
                })
            }
            None => {
                let rows = self
                    .float
                    .into_iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let off: f64 = row.values().sum();
                        let mut row: Vec<(usize, f64)> = row.into_iter().collect();
                        let diag = 1.0 - off;
                        if diag > 0.0 {
                            row.push((i, diag));
                            row.sort_unstable_by_key(|a| a.0);
                        }
                        row
                    })
                    .collect();
                TransitionMatrix { rows, exact: None }
            }
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Least common multiple of `values`, or `None` on 128-bit overflow.
pub fn checked_lcm<I: IntoIterator<Item = u128>>(values: I) -> Option<u128> {
    let mut acc: u128 = 1;
    for v in values {
        if v == 0 {
            continue;
        }
        let g = acc.gcd(&v);
        acc = (acc / g).checked_mul(v)?;
    }
    Some(acc)
}

impl TransitionMatrix {
    pub fn from_exact(exact: ExactRows) -> Self {
        let d = exact.denominator as f64;
        let rows = exact
            .numerators
            .iter()
            .map(|row| row.iter().map(|&(j, a)| (j, a as f64 / d)).collect())
            .collect();
        Self {
            rows,
            exact: Some(exact),
        }
    }

    /// Float-mode matrix from sparse rows; entries are sorted and zeros dropped.
    pub fn from_rows(mut rows: Vec<Vec<(usize, f64)>>) -> Self {
        for row in &mut rows {
            row.retain(|e| e.1 != 0.0);
            row.sort_unstable_by_key(|a| a.0);
        }
        Self { rows, exact: None }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.rows[i];
        row.binary_search_by(|e| e.0.cmp(&j))
            .map(|p| row[p].1)
            .unwrap_or(0.0)
    }

    pub fn exact(&self) -> Option<&ExactRows> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact entry, when the matrix is in rational mode.
    pub fn exact_entry(&self, i: usize, j: usize) -> Option<Ratio<u128>> {
        let e = self.exact.as_ref()?;
        let row = &e.numerators[i];
        let a = row
            .binary_search_by(|x| x.0.cmp(&j))
            .map(|p| row[p].1)
            .unwrap_or(0);
        Some(Ratio::new(a, e.denominator))
    }

    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Exact comparison in rational mode, `tol` otherwise.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        if let Some(e) = &self.exact {
            return e.numerators.iter().enumerate().all(|(i, row)| {
                row.iter().all(|&(j, a)| {
                    let back = &e.numerators[j];
                    back.binary_search_by(|x| x.0.cmp(&i))
                        .map(|p| back[p].1 == a)
                        .unwrap_or(false)
                })
            });
        }
        self.rows.iter().enumerate().all(|(i, row)| {
            row.iter().all(|&(j, a)| (self.get(j, i) - a).abs() <= tol)
        })
    }

    /// Rows sum to one: exactly in rational mode, within `tol` otherwise.
    pub fn rows_stochastic(&self, tol: f64) -> bool {
        if let Some(e) = &self.exact {
            return e
                .numerators
                .iter()
                .all(|row| row.iter().map(|x| x.1).sum::<u128>() == e.denominator);
        }
        self.rows
            .iter()
            .all(|row| (row.iter().map(|x| x.1).sum::<f64>() - 1.0).abs() <= tol)
    }

    /// Columns sum to one, i.e. the uniform distribution is stationary.
    pub fn columns_stochastic(&self, tol: f64) -> bool {
        if let Some(e) = &self.exact {
            let mut sums = vec![0u128; self.len()];
            for row in &e.numerators {
                for &(j, a) in row {
                    sums[j] += a;
                }
            }
            return sums.iter().all(|&s| s == e.denominator);
        }
        let mut sums = vec![0.0f64; self.len()];
        for row in &self.rows {
            for &(j, a) in row {
                sums[j] += a;
            }
        }
        sums.iter().all(|s| (s - 1.0).abs() <= tol)
    }

    pub fn is_doubly_stochastic(&self, tol: f64) -> bool {
        self.rows_stochastic(tol) && self.columns_stochastic(tol)
    }

    /// Largest `|Σ_j P(i,j) − 1|` over rows, in floating point.
    pub fn max_row_sum_deviation(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.iter().map(|x| x.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Connected components of the support graph (off-diagonal entries,
    /// treated as undirected), each sorted.
    pub fn support_components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                if i != j && a > 0.0 {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_support_connected(&self) -> bool {
        self.support_components().len() <= 1
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.len();
        let mut d = DenseMatrix::zeros(n);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, a) in row {
                d.set(i, j, a);
            }
        }
        d
    }

    /// `μ ↦ μP`.
    pub fn apply_left(&self, mu: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|x| *x = 0.0);
        for (i, row) in self.rows.iter().enumerate() {
            let m = mu[i];
            if m != 0.0 {
                for &(j, a) in row {
                    out[j] += m * a;
                }
            }
        }
    }

    /// `x ↦ Px`.
    pub fn apply_right(&self, x: &[f64], out: &mut [f64]) {
        for (i, row) in self.rows.iter().enumerate() {
            out[i] = row.iter().map(|&(j, a)| a * x[j]).sum();
        }
    }

    /// Multiplies every off-diagonal entry by `num/den` (at most 1) and
    /// completes the diagonal. Stays exact when the new denominator fits.
    pub fn scale_off_diagonal(&self, num: u128, den: u128) -> Self {
        assert!(den > 0 && num <= den, "scale factor must lie in [0, 1]");
        if let Some(e) = &self.exact {
            if let Some(d) = e.denominator.checked_mul(den) {
                let numerators = e
                    .numerators
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let mut off = 0u128;
                        let mut out: Vec<(usize, u128)> = row
                            .iter()
                            .filter(|x| x.0 != i)
                            .map(|&(j, a)| {
                                let s = a * num;
                                off += s;
                                (j, s)
                            })
                            .filter(|x| x.1 != 0)
                            .collect();
                        if off < d {
                            out.push((i, d - off));
                            out.sort_unstable_by_key(|x| x.0);
                        }
                        out
                    })
                    .collect();
                return Self::from_exact(ExactRows {
                    denominator: d,
                    numerators,
                });
            }
        }
        let f = num as f64 / den as f64;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut off = 0.0;
                let mut out: Vec<(usize, f64)> = row
                    .iter()
                    .filter(|x| x.0 != i)
                    .map(|&(j, a)| {
                        off += a * f;
                        (j, a * f)
                    })
                    .collect();
                out.push((i, 1.0 - off));
                out
            })
            .collect();
        Self::from_rows(rows)
    }

    /// Chain restricted to `states`: transitions leaving the set are folded
    /// into the diagonal. States are relabelled in the order given.
    pub fn restricted(&self, states: &[usize]) -> Self {
        let mut local = BTreeMap::new();
        for (a, &s) in states.iter().enumerate() {
            local.insert(s, a);
        }
        if let Some(e) = &self.exact {
            let d = e.denominator;
            let numerators = states
                .iter()
                .enumerate()
                .map(|(a, &s)| {
                    let mut off = 0u128;
                    let mut row: Vec<(usize, u128)> = e.numerators[s]
                        .iter()
                        .filter(|x| x.0 != s)
                        .filter_map(|&(j, w)| local.get(&j).map(|&b| (b, w)))
                        .inspect(|x| off += x.1)
                        .collect();
                    if off < d {
                        row.push((a, d - off));
                    }
                    row.sort_unstable_by_key(|x| x.0);
                    row
                })
                .collect();
            return Self::from_exact(ExactRows {
                denominator: d,
                numerators,
            });
        }
        let rows = states
            .iter()
            .enumerate()
            .map(|(a, &s)| {
                let mut off = 0.0;
                let mut row: Vec<(usize, f64)> = self.rows[s]
                    .iter()
                    .filter(|x| x.0 != s)
                    .filter_map(|&(j, w)| local.get(&j).map(|&b| (b, w)))
                    .inspect(|x| off += x.1)
                    .collect();
                row.push((a, 1.0 - off));
                row
            })
            .collect();
        Self::from_rows(rows)
    }
}
