//! Dense QUBO model, exact objective evaluation and the incremental 1-flip
//! delta structure.
//!
//! The objective is
//!
//! ```text
//! f(x) = Σ_i Q_ii x_i + Σ_i Σ_{j≠i} Q_ij x_i x_j
//! ```
//!
//! over a full symmetric `Q`, so every unordered pair `{i, j}` contributes
//! `2·Q_ij` when both variables are set. Loaders that read an interaction
//! `(i, j, v)` store `Q_ij = Q_ji = v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Weight;

/// A dense, symmetric, integer QUBO instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuboProblem<W> {
    n: usize,
    q: Vec<W>,
    name: String,
    negated: bool,
}

impl<W: Weight> QuboProblem<W> {
    /// Builds a problem from a row-major `n×n` matrix, rejecting asymmetric input.
    pub fn from_dense(n: usize, q: Vec<W>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty);
        }
        if q.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: q.len(),
            });
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if q[i * n + j] != q[j * n + i] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        let problem = Self {
            n,
            q,
            name: String::new(),
            negated: false,
        };
        problem.check_magnitude()?;
        Ok(problem)
    }

    pub fn from_rows(rows: &[Vec<W>]) -> Result<Self> {
        let n = rows.len();
        let mut q = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len(),
                });
            }
            q.extend_from_slice(row);
        }
        Self::from_dense(n, q)
    }

    /// Builds a problem from 0-indexed `(i, j, v)` triplets.
    ///
    /// Off-diagonal triplets set both `Q_ij` and `Q_ji`. Repeated entries for
    /// the same unordered pair accumulate.
    pub fn from_triplets<I>(n: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, W)>,
    {
        if n == 0 {
            return Err(Error::Empty);
        }
        let mut q = vec![W::zero(); n * n];
        for (i, j, v) in triplets {
            for index in [i, j] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n });
                }
            }
            q[i * n + j] += v;
            if i != j {
                q[j * n + i] += v;
            }
        }
        let problem = Self {
            n,
            q,
            name: String::new(),
            negated: false,
        };
        problem.check_magnitude()?;
        Ok(problem)
    }

    /// Rejects matrices whose absolute coefficient mass could overflow `W`
    /// in an objective or a delta. The bound is half the type maximum.
    fn check_magnitude(&self) -> Result<()> {
        let sum: i128 = self.q.iter().map(|v| v.widen().abs()).sum();
        let bound = W::max_value().widen() / 2;
        if sum > bound {
            return Err(Error::MagnitudeOverflow { sum, bound });
        }
        Ok(())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_negated(mut self, negated: bool) -> Self {
        self.negated = negated;
        self
    }

    /// Returns the problem with every coefficient negated and the `negated`
    /// flag toggled (maximization ↔ minimization).
    pub fn negate(mut self) -> Self {
        for v in &mut self.q {
            *v = -*v;
        }
        self.negated = !self.negated;
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// True when the source instance was a maximization converted by negation.
    pub fn negated(&self) -> bool {
        self.negated
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> W {
        self.q[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[W] {
        &self.q[i * self.n..(i + 1) * self.n]
    }

    pub fn matrix(&self) -> &[W] {
        &self.q
    }

    /// Upper-triangular nonzero entries `(i, j, Q_ij)` with `i ≤ j`, row-major.
    pub fn upper_triplets(&self) -> impl Iterator<Item = (usize, usize, W)> + '_ {
        (0..self.n).flat_map(move |i| {
            (i..self.n).filter_map(move |j| {
                let v = self.get(i, j);
                (!v.is_zero()).then_some((i, j, v))
            })
        })
    }

    /// Fraction of nonzero entries in the upper triangle (diagonal included).
    pub fn density(&self) -> f64 {
        let total = self.n * (self.n + 1) / 2;
        self.upper_triplets().count() as f64 / total as f64
    }

    fn check_len(&self, x: &[bool]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Exact objective `f(x)`.
    pub fn evaluate(&self, x: &[bool]) -> Result<W> {
        self.check_len(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &[bool]) -> W {
        let active: Vec<usize> = active_indices(x);
        let mut total = W::zero();
        for &i in &active {
            let row = self.row(i);
            for &j in &active {
                total += row[j];
            }
        }
        total
    }

    /// `deltas[k] = f(flip(x, k)) − f(x)` for every `k`.
    pub fn init_deltas(&self, x: &[bool]) -> Result<Vec<W>> {
        self.check_len(x)?;
        let two = W::one() + W::one();
        let active = active_indices(x);
        Ok((0..self.n)
            .map(|k| {
                let row = self.row(k);
                let mut interaction = W::zero();
                for &j in &active {
                    if j != k {
                        interaction += row[j];
                    }
                }
                let gain = row[k] + two * interaction;
                if x[k] {
                    -gain
                } else {
                    gain
                }
            })
            .collect())
    }
}

fn active_indices(x: &[bool]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter_map(|(i, &b)| b.then_some(i))
        .collect()
}

/// One candidate solution together with its objective and live 1-flip deltas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverState<W> {
    x: Vec<bool>,
    objective: W,
    deltas: Vec<W>,
}

impl<W: Weight> SolverState<W> {
    pub fn new(problem: &QuboProblem<W>, x: Vec<bool>) -> Result<Self> {
        let deltas = problem.init_deltas(&x)?;
        let objective = problem.evaluate_unchecked(&x);
        Ok(Self {
            x,
            objective,
            deltas,
        })
    }

    pub fn x(&self) -> &[bool] {
        &self.x
    }

    pub fn into_x(self) -> Vec<bool> {
        self.x
    }

    #[inline]
    pub fn objective(&self) -> W {
        self.objective
    }

    #[inline]
    pub fn deltas(&self) -> &[W] {
        &self.deltas
    }

    /// Flips variable `i`, updating the objective and all deltas in O(n).
    pub fn apply_flip(&mut self, problem: &QuboProblem<W>, i: usize) -> Result<()> {
        let n = problem.n();
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if self.x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.x.len(),
            });
        }
        self.flip_unchecked(problem, i);
        Ok(())
    }

    #[inline]
    pub(crate) fn flip_unchecked(&mut self, problem: &QuboProblem<W>, i: usize) {
        let gain = self.deltas[i];
        self.objective += gain;
        self.deltas[i] = -gain;
        let now_set = !self.x[i];
        self.x[i] = now_set;

        // Setting x_i adds 2·Q_ij to every neighbour's "turn on" gain; clearing
        // it removes the same amount. A neighbour that is already on sees the
        // opposite sign.
        let two = W::one() + W::one();
        let step = if now_set { two } else { -two };
        let row = problem.row(i);
        for (j, ((delta, &xj), &qij)) in self
            .deltas
            .iter_mut()
            .zip(self.x.iter())
            .zip(row.iter())
            .enumerate()
        {
            if j == i {
                continue;
            }
            let change = step * qij;
            if xj {
                *delta -= change;
            } else {
                *delta += change;
            }
        }
    }
}

/// Returns `x` with bit `k` inverted.
pub fn flipped(x: &[bool], k: usize) -> Vec<bool> {
    let mut y = x.to_vec();
    y[k] = !y[k];
    y
}
