//! Ising form of a QUBO instance.
//!
//! With spins `s_i = 2·x_i − 1` the energy is
//!
//! ```text
//! E(s) = −Σ_i Σ_j J_ij s_i s_j − Σ_i h_i s_i
//! ```
//!
//! and [`to_ising`] picks `J`, `h` and a constant `offset` such that
//! `E(s) + offset == f(x)`. Substituting `x = (s + 1)/2` gives
//!
//! ```text
//! J_ij   = −Q_ij / 4                       (i ≠ j, J_ii = 0)
//! h_i    = −(Q_ii + Σ_{j≠i} Q_ij) / 2
//! offset = Σ_i Q_ii / 2 + Σ_{i≠j} Q_ij / 4
//! ```
//!
//! Quarters and halves appear, so the target scalar is generic: use
//! [`num_rational::Rational64`] for exact checks and `f64` for the annealer.

use num_traits::{FromPrimitive, Num};

use crate::qubo::QuboProblem;
use crate::scalar::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct IsingProblem<R> {
    n: usize,
    couplings: Vec<R>,
    fields: Vec<R>,
    offset: R,
}

impl<R> IsingProblem<R>
where
    R: Num + Clone,
{
    pub fn n(&self) -> usize {
        self.n
    }

    /// Coupling `J_ij`; symmetric with a zero diagonal.
    pub fn coupling(&self, i: usize, j: usize) -> &R {
        &self.couplings[i * self.n + j]
    }

    pub fn coupling_row(&self, i: usize) -> &[R] {
        &self.couplings[i * self.n..(i + 1) * self.n]
    }

    pub fn fields(&self) -> &[R] {
        &self.fields
    }

    pub fn offset(&self) -> &R {
        &self.offset
    }

    /// Energy of a spin configuration (entries must be ±1).
    pub fn energy(&self, spins: &[i8]) -> R {
        assert_eq!(spins.len(), self.n, "spin vector length");
        let mut pair = R::zero();
        let mut linear = R::zero();
        for (i, &si) in spins.iter().enumerate() {
            let row = self.coupling_row(i);
            let mut local = R::zero();
            for (j, &sj) in spins.iter().enumerate() {
                if i != j {
                    local = local + signed(row[j].clone(), sj);
                }
            }
            pair = pair + signed(local, si);
            linear = linear + signed(self.fields[i].clone(), si);
        }
        R::zero() - pair - linear
    }
}

fn signed<R: Num>(v: R, s: i8) -> R {
    if s >= 0 {
        v
    } else {
        R::zero() - v
    }
}

/// `s_i = 2·x_i − 1`.
pub fn spins_from_bits(x: &[bool]) -> Vec<i8> {
    x.iter().map(|&b| if b { 1 } else { -1 }).collect()
}

pub fn bits_from_spins(s: &[i8]) -> Vec<bool> {
    s.iter().map(|&v| v > 0).collect()
}

/// Converts a QUBO instance into its Ising form.
pub fn to_ising<W, R>(problem: &QuboProblem<W>) -> IsingProblem<R>
where
    W: Weight,
    R: Num + Clone + FromPrimitive,
{
    let n = problem.n();
    let lift = |v: i128| R::from_i128(v).expect("coefficient representable in target scalar");
    let two = lift(2);
    let four = lift(4);

    let mut couplings = Vec::with_capacity(n * n);
    let mut fields = Vec::with_capacity(n);
    let mut diagonal_sum = 0i128;
    let mut off_diagonal_sum = 0i128;
    for i in 0..n {
        let row = problem.row(i);
        let mut row_off = 0i128;
        for (j, &q) in row.iter().enumerate() {
            if i == j {
                couplings.push(R::zero());
            } else {
                let q = q.widen();
                row_off += q;
                couplings.push(R::zero() - lift(q) / four.clone());
            }
        }
        let qii = row[i].widen();
        diagonal_sum += qii;
        off_diagonal_sum += row_off;
        fields.push(R::zero() - lift(qii + row_off) / two.clone());
    }
    let offset = lift(diagonal_sum) / two + lift(off_diagonal_sum) / four;
    IsingProblem {
        n,
        couplings,
        fields,
        offset,
    }
}
