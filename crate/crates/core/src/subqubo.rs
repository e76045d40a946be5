//! SubQUBO extraction with boundary bias, and the two Ising-machine passes
//! over a solution set.
//!
//! For a subset `S` of variables and a current assignment `x`, the frozen
//! variables outside `S` contribute a linear bias
//!
//! ```text
//! b_i = Σ_{j∉S} 2·Q_ij·x_j       (i ∈ S)
//! ```
//!
//! that is folded onto the diagonal of the restricted matrix. Together with
//! the constant `offset` (the objective of the frozen part alone) this gives
//! `f_sub(y) + offset == f(embed(x, y))` exactly.

use std::ops::Range;

use rayon::prelude::*;

use crate::backend::IsingMachine;
use crate::control::rank_descending;
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;
use crate::rng::{Phase, Streams};
use crate::scalar::{Real, Weight};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubQubo<W> {
    indices: Vec<usize>,
    qubo: QuboProblem<W>,
    offset: W,
}

impl<W: Weight> SubQubo<W> {
    /// Global indices, in subproblem order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    /// The biased subproblem.
    pub fn qubo(&self) -> &QuboProblem<W> {
        &self.qubo
    }

    pub fn offset(&self) -> W {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn evaluate(&self, y: &[bool]) -> Result<W> {
        self.qubo.evaluate(y)
    }

    /// Current values of the subset variables in `x`.
    pub fn restrict(&self, x: &[bool]) -> Vec<bool> {
        self.indices.iter().map(|&i| x[i]).collect()
    }

    /// Writes `y` into `x` at the subset positions.
    pub fn embed(&self, x: &mut [bool], y: &[bool]) {
        debug_assert_eq!(y.len(), self.indices.len());
        for (&i, &v) in self.indices.iter().zip(y) {
            x[i] = v;
        }
    }
}

/// Builds the biased subproblem over `indices` given the current assignment `x`.
pub fn build_subqubo<W: Weight>(
    problem: &QuboProblem<W>,
    x: &[bool],
    indices: &[usize],
) -> Result<SubQubo<W>> {
    let n = problem.n();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if indices.is_empty() {
        return Err(Error::Empty);
    }
    let mut inside = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if std::mem::replace(&mut inside[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }

    let frozen_active: Vec<usize> = (0..n).filter(|&j| x[j] && !inside[j]).collect();
    let two = W::one() + W::one();
    let m = indices.len();
    let mut q = Vec::with_capacity(m * m);
    for &gi in indices {
        let row = problem.row(gi);
        let bias: W = frozen_active.iter().map(|&j| row[j]).sum::<W>() * two;
        for &gj in indices {
            q.push(if gi == gj { row[gi] + bias } else { row[gj] });
        }
    }
    let mut offset = W::zero();
    for &i in &frozen_active {
        let row = problem.row(i);
        for &j in &frozen_active {
            offset += row[j];
        }
    }
    Ok(SubQubo {
        indices: indices.to_vec(),
        qubo: QuboProblem::from_dense(m, q)?,
        offset,
    })
}

/// Contiguous segments of length `m` covering `0..n`; the last may be shorter.
pub fn segments(n: usize, m: usize) -> Vec<Range<usize>> {
    assert!(m > 0, "segment size must be positive");
    (0..n)
        .step_by(m)
        .map(|start| start..(start + m).min(n))
        .collect()
}

pub(crate) fn for_each_row<T, F>(rows: &mut [T], parallel: bool, f: F) -> Result<()>
where
    T: Send,
    F: Fn(usize, &mut T) -> Result<()> + Sync,
{
    if parallel {
        rows.par_iter_mut()
            .enumerate()
            .map(|(p, row)| f(p, row))
            .collect::<Result<Vec<()>>>()?;
    } else {
        for (p, row) in rows.iter_mut().enumerate() {
            f(p, row)?;
        }
    }
    Ok(())
}

/// Solves the subproblem over `indices` for one solution and writes it back.
pub fn solve_subset<W: Weight, B: IsingMachine<W> + ?Sized>(
    problem: &QuboProblem<W>,
    x: &mut [bool],
    indices: &[usize],
    backend: &B,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<()> {
    let sub = build_subqubo(problem, x, indices)?;
    let start = sub.restrict(x);
    let y = backend.solve(sub.qubo(), &start, rng)?;
    sub.embed(x, &y);
    Ok(())
}

/// Full-coverage pass: every solution is cut into contiguous segments of at
/// most `m` variables, solved left to right. Each segment is biased by the
/// current values of all other variables, including segments already
/// rewritten in this pass.
pub fn im_solution_set<W: Weight, B: IsingMachine<W> + ?Sized>(
    problem: &QuboProblem<W>,
    solutions: &mut [Vec<bool>],
    backend: &B,
    m: usize,
    streams: &Streams,
    parallel: bool,
) -> Result<()> {
    let m = check_machine_size(problem.n(), m, backend)?;
    let segs = segments(problem.n(), m);
    for_each_row(solutions, parallel, |p, x| {
        for (l, seg) in segs.iter().enumerate() {
            let indices: Vec<usize> = seg.clone().collect();
            let mut rng = streams.stream(Phase::InitialIm, p as u64, l as u64);
            solve_subset(problem, x, &indices, backend, &mut rng)?;
        }
        Ok(())
    })
}

/// Guided pass: for each solution, the `m` variables with the highest score
/// in its row of `scores` form one subproblem, solved once and written back.
/// Returns the solved index sets, one per solution.
#[allow(clippy::too_many_arguments)]
pub fn im_partial_solution_set<W: Weight, R: Real, B: IsingMachine<W> + ?Sized>(
    problem: &QuboProblem<W>,
    solutions: &mut [Vec<bool>],
    scores: &[Vec<R>],
    backend: &B,
    m: usize,
    streams: &Streams,
    epoch: u64,
    parallel: bool,
) -> Result<Vec<Vec<usize>>> {
    let n = problem.n();
    let m = check_machine_size(n, m, backend)?;
    if scores.len() != solutions.len() {
        return Err(Error::DimensionMismatch {
            expected: solutions.len(),
            found: scores.len(),
        });
    }
    let mut rows: Vec<(&mut Vec<bool>, Vec<usize>)> =
        solutions.iter_mut().map(|x| (x, Vec::new())).collect();
    for_each_row(&mut rows, parallel, |p, (x, chosen)| {
        let mut ranked = rank_descending(&scores[p], 0..n);
        ranked.truncate(m);
        let mut rng = streams.stream(Phase::PartialIm, epoch, p as u64);
        solve_subset(problem, x, &ranked, backend, &mut rng)?;
        *chosen = ranked;
        Ok(())
    })?;
    Ok(rows.into_iter().map(|(_, chosen)| chosen).collect())
}

fn check_machine_size<W: Weight, B: IsingMachine<W> + ?Sized>(
    n: usize,
    m: usize,
    backend: &B,
) -> Result<usize> {
    if m == 0 {
        return Err(Error::InvalidConfig("machine size must be positive".into()));
    }
    let m = m.min(n);
    if m > backend.capacity() {
        return Err(Error::Capacity {
            size: m,
            limit: backend.capacity(),
        });
    }
    Ok(m)
}
