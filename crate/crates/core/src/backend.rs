//! Emulated Ising machines.
//!
//! Anything implementing [`IsingMachine`] can stand in for the hardware: it
//! receives a (biased) QUBO of at most [`IsingMachine::capacity`] variables and
//! the current assignment of those variables, and returns a new assignment.
//! A client for a remote annealing service would implement the same trait.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::{bits_from_spins, spins_from_bits, to_ising, IsingProblem};
use crate::qubo::{QuboProblem, SolverState};
use crate::scalar::Weight;

pub trait IsingMachine<W: Weight>: Send + Sync {
    /// Largest subproblem accepted.
    fn capacity(&self) -> usize;

    fn solve(
        &self,
        qubo: &QuboProblem<W>,
        start: &[bool],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<bool>>;
}

impl<W: Weight, T: IsingMachine<W> + ?Sized> IsingMachine<W> for Box<T> {
    fn capacity(&self) -> usize {
        (**self).capacity()
    }

    fn solve(
        &self,
        qubo: &QuboProblem<W>,
        start: &[bool],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<bool>> {
        (**self).solve(qubo, start, rng)
    }
}

/// Largest subproblem the exhaustive backend will enumerate.
pub const EXACT_LIMIT: usize = 24;

/// Exhaustive ground-state search in Gray-code order.
///
/// Ties are broken towards the assignment with the lowest binary value, bit
/// `k` of the value being variable `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSolver {
    capacity: usize,
}

impl Default for ExactSolver {
    fn default() -> Self {
        Self {
            capacity: EXACT_LIMIT,
        }
    }
}

impl ExactSolver {
    pub fn new(capacity: usize) -> Result<Self> {
        if capacity == 0 || capacity > EXACT_LIMIT {
            return Err(Error::Capacity {
                size: capacity,
                limit: EXACT_LIMIT,
            });
        }
        Ok(Self { capacity })
    }

    pub fn minimize<W: Weight>(&self, qubo: &QuboProblem<W>) -> Result<Vec<bool>> {
        let m = qubo.n();
        if m > self.capacity {
            return Err(Error::Capacity {
                size: m,
                limit: self.capacity,
            });
        }
        let mut state = SolverState::new(qubo, vec![false; m])?;
        let mut code: u32 = 0;
        let mut best = (state.objective(), 0u32);
        for step in 1u32..(1u32 << m) {
            let bit = step.trailing_zeros() as usize;
            state.flip_unchecked(qubo, bit);
            code ^= 1 << bit;
            let candidate = (state.objective(), code);
            if candidate < best {
                best = candidate;
            }
        }
        Ok((0..m).map(|k| best.1 >> k & 1 == 1).collect())
    }
}

impl<W: Weight> IsingMachine<W> for ExactSolver {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn solve(
        &self,
        qubo: &QuboProblem<W>,
        _start: &[bool],
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<bool>> {
        self.minimize(qubo)
    }
}

/// Single-spin-flip Metropolis annealing on the Ising form, with a geometric
/// inverse-temperature schedule.
///
/// The schedule runs from `ln 2 / ΔE_max` (most uphill moves accepted with
/// probability ≥ 1/2) to `ln 100 / 1`: every nonzero energy change of an
/// integer QUBO is at least one, so the last sweeps are essentially greedy.
/// The best configuration visited is returned, which is never worse than the
/// start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulatedAnnealer {
    capacity: usize,
    sweeps: usize,
}

impl SimulatedAnnealer {
    pub const DEFAULT_SWEEPS: usize = 1000;

    pub fn new(capacity: usize, sweeps: usize) -> Self {
        Self {
            capacity: capacity.max(1),
            sweeps: sweeps.max(1),
        }
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    fn anneal(&self, ising: &IsingProblem<f64>, start: &[bool], rng: &mut ChaCha8Rng) -> Vec<bool> {
        let m = ising.n();
        let mut spins = spins_from_bits(start);
        let h = ising.fields();

        let max_delta = (0..m)
            .map(|i| {
                let coupling: f64 = ising.coupling_row(i).iter().map(|j| j.abs()).sum();
                2.0 * (h[i].abs() + 2.0 * coupling)
            })
            .fold(0.0, f64::max);
        if max_delta == 0.0 {
            return start.to_vec();
        }

        let mut local: Vec<f64> = (0..m)
            .map(|i| {
                ising
                    .coupling_row(i)
                    .iter()
                    .zip(&spins)
                    .map(|(&j, &s)| j * f64::from(s))
                    .sum()
            })
            .collect();
        let mut energy = ising.energy(&spins);
        let mut best_energy = energy;
        let mut best_spins = spins.clone();

        let beta_hot = std::f64::consts::LN_2 / max_delta;
        let beta_cold = 100f64.ln();
        let ratio = if self.sweeps > 1 {
            (beta_cold / beta_hot).powf(1.0 / (self.sweeps - 1) as f64)
        } else {
            1.0
        };
        let mut beta = if self.sweeps > 1 { beta_hot } else { beta_cold };

        for _ in 0..self.sweeps {
            for i in 0..m {
                let s = f64::from(spins[i]);
                let delta = 2.0 * s * (2.0 * local[i] + h[i]);
                let accept = delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp();
                if !accept {
                    continue;
                }
                spins[i] = -spins[i];
                energy += delta;
                for (l, &j) in local.iter_mut().zip(ising.coupling_row(i)) {
                    *l -= 2.0 * j * s;
                }
                if energy < best_energy {
                    best_energy = energy;
                    best_spins.copy_from_slice(&spins);
                }
            }
            beta *= ratio;
        }
        bits_from_spins(&best_spins)
    }
}

impl<W: Weight> IsingMachine<W> for SimulatedAnnealer {
    fn capacity(&self) -> usize {
        self.capacity
    }

    fn solve(
        &self,
        qubo: &QuboProblem<W>,
        start: &[bool],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<bool>> {
        let m = qubo.n();
        if m > self.capacity {
            return Err(Error::Capacity {
                size: m,
                limit: self.capacity,
            });
        }
        if start.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: start.len(),
            });
        }
        let ising: IsingProblem<f64> = to_ising(qubo);
        Ok(self.anneal(&ising, start, rng))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Exact,
    #[default]
    Annealing,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Exact => "exact",
            Self::Annealing => "annealing",
        })
    }
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "annealing" | "sa" => Ok(Self::Annealing),
            other => Err(Error::InvalidConfig(format!("unknown backend {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BackendSpec {
    pub kind: BackendKind,
    /// Machine size `m`.
    pub machine_size: usize,
    pub sweeps: usize,
}

impl Default for BackendSpec {
    fn default() -> Self {
        Self {
            kind: BackendKind::Annealing,
            machine_size: 50,
            sweeps: SimulatedAnnealer::DEFAULT_SWEEPS,
        }
    }
}

/// A constructed backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact(ExactSolver),
    Annealing(SimulatedAnnealer),
}

impl Backend {
    /// Builds the backend for a problem of `n` variables; the machine size is
    /// clamped to `n`.
    pub fn for_problem(spec: &BackendSpec, n: usize) -> Result<Self> {
        let m = spec.machine_size.min(n);
        match spec.kind {
            BackendKind::Exact => Ok(Self::Exact(ExactSolver::new(m)?)),
            BackendKind::Annealing => Ok(Self::Annealing(SimulatedAnnealer::new(m, spec.sweeps))),
        }
    }
}

impl<W: Weight> IsingMachine<W> for Backend {
    fn capacity(&self) -> usize {
        match self {
            Self::Exact(b) => IsingMachine::<W>::capacity(b),
            Self::Annealing(b) => IsingMachine::<W>::capacity(b),
        }
    }

    fn solve(
        &self,
        qubo: &QuboProblem<W>,
        start: &[bool],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<bool>> {
        match self {
            Self::Exact(b) => b.solve(qubo, start, rng),
            Self::Annealing(b) => b.solve(qubo, start, rng),
        }
    }
}
