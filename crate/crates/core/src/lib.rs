//! Hybrid QUBO solver: tabu search plus control-parameter guided subQUBO
//! extraction solved on an emulated Ising machine.
//!
//! The core is generic over the integer weight type ([`Weight`]) and the float
//! type used for control parameters ([`Real`]); the aliases below fix the
//! common choices.

pub mod backend;
pub mod control;
pub mod driver;
pub mod error;
pub mod ising;
pub mod qubo;
pub mod rng;
pub mod scalar;
pub mod subqubo;
pub mod tabu;

pub use backend::{
    Backend, BackendKind, BackendSpec, ExactSolver, IsingMachine, SimulatedAnnealer,
};
pub use control::{Annealer, ControlParams, ControlWeights, MutationSchedule};
pub use driver::{
    solve, solve_ablated, solve_with, CodePaths, EpochRecord, Incumbent, RunOutcome, RunTrace,
    SolverConfig, StopReason, TabuFeed, Variant,
};
pub use error::{Error, Result};
pub use ising::{to_ising, IsingProblem};
pub use qubo::{QuboProblem, SolverState};
pub use rng::{Phase, Streams};
pub use scalar::{Real, Weight};
pub use subqubo::{build_subqubo, im_partial_solution_set, im_solution_set, SubQubo};
pub use tabu::{tabu_search, TabuConfig, TabuOutcome};

/// 64-bit integer QUBO, the default problem type.
pub type Qubo = QuboProblem<i64>;
/// Exact (rational) Ising form.
pub type ExactIsing = IsingProblem<num_rational::Rational64>;
/// Floating-point Ising form used by the annealing emulator.
pub type FloatIsing = IsingProblem<f64>;
pub type State = SolverState<i64>;
pub type Trace = RunTrace<i64>;
pub type Outcome = RunOutcome<i64>;
