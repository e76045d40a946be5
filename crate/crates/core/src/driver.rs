//! The hybrid solver loop.
//!
//! Initialization draws `z` random solutions and sweeps each with the Ising
//! machine segment by segment. Every epoch then
//!
//! 1. runs tabu search on each solution and records its flip counts,
//! 2. derives `gamma` from the solution set and stability from the counts,
//! 3. aggregates them (with the fixed `eta`) into the ranking matrix `A`,
//! 4. sends the top-`m` variables of each solution to the Ising machine,
//! 5. mutates the remaining high-ranked variables at the annealed rate.
//!
//! The loop stops after `patience` consecutive epochs without improving the
//! incumbent, or at `epoch_cap`. The incumbent is tracked separately and is
//! never mutated.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::backend::{Backend, BackendSpec};
use crate::control::{
    deviation, min_max_normalize, mutate_solution, stability, weight_effect, Annealer,
    ControlParams, ControlWeights, MutationSchedule,
};
use crate::error::{Error, Result};
use crate::qubo::QuboProblem;
use crate::rng::{Phase, Streams};
use crate::scalar::{Real, Weight};
use crate::subqubo::{im_partial_solution_set, im_solution_set};
use crate::tabu::{default_alpha, default_tenure, tabu_search, TabuConfig, TabuOutcome};

/// Which parts of the method are active.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Full,
    /// Control parameters replaced by uniform random scores.
    NoSm,
    /// No Ising machine; mutation draws from all variables.
    NoIm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Full, Variant::NoSm, Variant::NoIm];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Full => "full",
            Self::NoSm => "no_sm",
            Self::NoIm => "no_im",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Self::Full),
            "no_sm" | "no-sm" => Ok(Self::NoSm),
            "no_im" | "no-im" => Ok(Self::NoIm),
            other => Err(Error::InvalidConfig(format!("unknown variant {other:?}"))),
        }
    }
}

/// What tabu search hands back to the solution set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TabuFeed {
    /// The best state visited.
    #[default]
    Best,
    /// The state at loop exit.
    Final,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Solution-set size.
    pub z: usize,
    /// Tabu iterations; `None` means `5n`.
    pub alpha: Option<usize>,
    /// Tabu tenure; `None` means `max(1, ⌊n/150⌋)`.
    pub tenure: Option<usize>,
    pub weights: ControlWeights<f64>,
    pub backend: BackendSpec,
    /// Consecutive epochs without improvement before stopping.
    pub patience: usize,
    pub epoch_cap: usize,
    pub seed: u64,
    pub schedule: MutationSchedule,
    pub variant: Variant,
    pub feed: TabuFeed,
    /// Dispatch per-solution work on the rayon pool. Results are identical
    /// either way.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            z: 4,
            alpha: None,
            tenure: None,
            weights: ControlWeights::default(),
            backend: BackendSpec::default(),
            patience: 30,
            epoch_cap: 300,
            seed: 0,
            schedule: MutationSchedule::Cosine,
            variant: Variant::Full,
            feed: TabuFeed::Best,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.z == 0 {
            return Err(Error::InvalidConfig("z must be at least 1".into()));
        }
        if self.patience == 0 {
            return Err(Error::InvalidConfig("patience must be at least 1".into()));
        }
        if self.tenure == Some(0) {
            return Err(Error::InvalidConfig(
                "tabu tenure must be at least 1".into(),
            ));
        }
        if self.backend.machine_size == 0 {
            return Err(Error::InvalidConfig("machine size must be positive".into()));
        }
        let ControlWeights { w1, w2, w3 } = self.weights;
        if [w1, w2, w3].iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig(
                "weights must be finite and non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn tabu_for(&self, n: usize) -> TabuConfig {
        TabuConfig {
            alpha: self.alpha.unwrap_or_else(|| default_alpha(n)),
            tenure: self.tenure.unwrap_or_else(|| default_tenure(n)),
        }
    }
}

/// Which stages a run exercised; lets reports show how algorithms differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct CodePaths {
    pub initial_im_pass: bool,
    pub control_params: bool,
    pub guided_im: bool,
    pub random_subset_im: bool,
    pub mutation: bool,
    pub annealer: bool,
    pub perturbation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord<W> {
    pub epoch: usize,
    /// Incumbent after the epoch.
    pub best: W,
    /// Objective of each solution at the end of the epoch.
    pub objectives: Vec<W>,
    /// Mutation rate used in the epoch.
    pub rate: f64,
    pub improved: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Patience,
    EpochCap,
}

/// Deterministic record of a run. Wall-clock timings live in [`RunOutcome`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace<W> {
    pub algorithm: String,
    pub problem: String,
    pub n: usize,
    pub seed: u64,
    pub machine_size: usize,
    pub paths: CodePaths,
    /// Objectives of the random starting solutions, before any Ising-machine
    /// pass. Identical across variants sharing a seed.
    pub sampled: Vec<W>,
    /// Objectives after initialization.
    pub initial: Vec<W>,
    pub initial_best: W,
    pub epochs: Vec<EpochRecord<W>>,
    pub best: W,
    /// Epoch in which the final incumbent was first reached (0 = initialization).
    pub epochs_to_best: usize,
    pub stop: StopReason,
    pub warnings: Vec<String>,
}

impl<W: Weight> RunTrace<W> {
    /// Incumbent after initialization followed by the incumbent after each epoch.
    pub fn best_series(&self) -> Vec<W> {
        std::iter::once(self.initial_best)
            .chain(self.epochs.iter().map(|e| e.best))
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome<W> {
    pub x: Vec<bool>,
    pub objective: W,
    pub trace: RunTrace<W>,
    pub elapsed: Duration,
    /// Cumulative wall time at the end of each epoch.
    pub epoch_times: Vec<Duration>,
}

/// Best solution seen so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incumbent<W> {
    pub x: Vec<bool>,
    pub objective: W,
}

impl<W: Weight> Incumbent<W> {
    pub fn new(x: Vec<bool>, objective: W) -> Self {
        Self { x, objective }
    }

    /// Takes `x` if it is strictly better. Returns whether it was taken.
    pub fn offer(&mut self, x: &[bool], objective: W) -> bool {
        if objective < self.objective {
            self.objective = objective;
            self.x.copy_from_slice(x);
            true
        } else {
            false
        }
    }

    /// Best of a set of solutions, lowest index on ties.
    pub fn best_of(solutions: &[Vec<bool>], objectives: &[W]) -> Self {
        let (p, &objective) = objectives
            .iter()
            .enumerate()
            .min_by_key(|(p, v)| (**v, *p))
            .expect("non-empty solution set");
        Self::new(solutions[p].clone(), objective)
    }
}

pub fn random_solutions(n: usize, z: usize, streams: &Streams) -> Vec<Vec<bool>> {
    (0..z)
        .map(|p| {
            let mut rng = streams.stream(Phase::InitialSolutions, p as u64, 0);
            (0..n).map(|_| rng.random_bool(0.5)).collect()
        })
        .collect()
}

pub fn evaluate_all<W: Weight>(
    problem: &QuboProblem<W>,
    solutions: &[Vec<bool>],
    parallel: bool,
) -> Vec<W> {
    if parallel {
        solutions
            .par_iter()
            .map(|x| problem.evaluate_unchecked(x))
            .collect()
    } else {
        solutions
            .iter()
            .map(|x| problem.evaluate_unchecked(x))
            .collect()
    }
}

pub fn tabu_all<W: Weight>(
    problem: &QuboProblem<W>,
    solutions: &[Vec<bool>],
    config: &TabuConfig,
    parallel: bool,
) -> Result<Vec<TabuOutcome<W>>> {
    if parallel {
        solutions
            .par_iter()
            .map(|x| tabu_search(problem, x, config))
            .collect()
    } else {
        solutions
            .iter()
            .map(|x| tabu_search(problem, x, config))
            .collect()
    }
}

/// Runs the configured variant with `f64` control parameters.
pub fn solve<W: Weight>(problem: &QuboProblem<W>, config: &SolverConfig) -> Result<RunOutcome<W>> {
    solve_with::<W, f64>(problem, config)
}

/// Runs `config` with the given ablation mode, everything else unchanged.
pub fn solve_ablated<W: Weight>(
    problem: &QuboProblem<W>,
    config: &SolverConfig,
    variant: Variant,
) -> Result<RunOutcome<W>> {
    let config = SolverConfig {
        variant,
        ..config.clone()
    };
    solve(problem, &config)
}

/// The solver loop, generic over the control-parameter scalar.
pub fn solve_with<W: Weight, R: Real>(
    problem: &QuboProblem<W>,
    config: &SolverConfig,
) -> Result<RunOutcome<W>> {
    config.validate()?;
    let started = Instant::now();
    let n = problem.n();
    let z = config.z;
    let variant = config.variant;
    let parallel = config.parallel;
    let streams = Streams::new(config.seed);
    let tabu = config.tabu_for(n);
    let mut warnings = Vec::new();

    let m = config.backend.machine_size.min(n);
    if m < config.backend.machine_size {
        warnings.push(format!(
            "machine size {} clamped to problem size {n}",
            config.backend.machine_size
        ));
    }
    let backend = Backend::for_problem(&config.backend, n)?;
    let uses_im = variant != Variant::NoIm;
    let paths = CodePaths {
        initial_im_pass: uses_im,
        control_params: variant != Variant::NoSm,
        guided_im: uses_im,
        mutation: true,
        annealer: true,
        ..CodePaths::default()
    };

    let mut solutions = random_solutions(n, z, &streams);
    let sampled = evaluate_all(problem, &solutions, parallel);
    if uses_im {
        im_solution_set(problem, &mut solutions, &backend, m, &streams, parallel)?;
    }
    let initial = evaluate_all(problem, &solutions, parallel);
    let mut incumbent = Incumbent::best_of(&solutions, &initial);
    let initial_best = incumbent.objective;

    let mut annealer = Annealer::<R>::new(config.schedule);
    let eta = min_max_normalize(&weight_effect::<W, R>(problem));
    let weights = ControlWeights {
        w1: R::lit(config.weights.w1),
        w2: R::lit(config.weights.w2),
        w3: R::lit(config.weights.w3),
    };

    let mut epochs = Vec::new();
    let mut epoch_times = Vec::new();
    let mut epochs_to_best = 0;
    let mut stall = 0;
    let mut stop = StopReason::EpochCap;

    for epoch in 1..=config.epoch_cap {
        let mut improved = false;

        let outcomes = tabu_all(problem, &solutions, &tabu, parallel)?;
        for (x, out) in solutions.iter_mut().zip(&outcomes) {
            improved |= incumbent.offer(&out.x_min, out.ov_min);
            match config.feed {
                TabuFeed::Best => x.copy_from_slice(&out.x_min),
                TabuFeed::Final => x.copy_from_slice(&out.x_final),
            }
        }

        let scores: Vec<Vec<R>> = match variant {
            Variant::NoSm => (0..z)
                .map(|p| {
                    let mut rng = streams.stream(Phase::UniformScores, epoch as u64, p as u64);
                    (0..n).map(|_| R::lit(rng.random::<f64>())).collect()
                })
                .collect(),
            Variant::Full | Variant::NoIm => ControlParams {
                eta: eta.clone(),
                stability: outcomes.iter().map(|o| stability(&o.flip_counts)).collect(),
                gamma: deviation(&solutions),
                weights,
            }
            .aggregate(),
        };

        let solved = if uses_im {
            let solved = im_partial_solution_set(
                problem,
                &mut solutions,
                &scores,
                &backend,
                m,
                &streams,
                epoch as u64,
                parallel,
            )?;
            let objectives = evaluate_all(problem, &solutions, parallel);
            for (x, &v) in solutions.iter().zip(&objectives) {
                improved |= incumbent.offer(x, v);
            }
            solved
        } else {
            vec![Vec::new(); z]
        };

        let rate = annealer.rate();
        let mutate = |(p, x): (usize, &mut Vec<bool>)| {
            let mut rng = streams.stream(Phase::Mutation, epoch as u64, p as u64);
            mutate_solution(x, &scores[p], rate, &solved[p], &mut rng);
        };
        if parallel {
            solutions.par_iter_mut().enumerate().for_each(mutate);
        } else {
            solutions.iter_mut().enumerate().for_each(mutate);
        }
        let objectives = evaluate_all(problem, &solutions, parallel);
        for (x, &v) in solutions.iter().zip(&objectives) {
            improved |= incumbent.offer(x, v);
        }

        epochs.push(EpochRecord {
            epoch,
            best: incumbent.objective,
            objectives,
            rate: rate.to_f64_lossy(),
            improved,
        });
        epoch_times.push(started.elapsed());
        annealer.next_rate();

        if improved {
            epochs_to_best = epoch;
            stall = 0;
        } else {
            stall += 1;
            if stall >= config.patience {
                stop = StopReason::Patience;
                break;
            }
        }
    }

    let trace = RunTrace {
        algorithm: variant.as_str().to_string(),
        problem: problem.name().to_string(),
        n,
        seed: config.seed,
        machine_size: m,
        paths,
        sampled,
        initial,
        initial_best,
        epochs,
        best: incumbent.objective,
        epochs_to_best,
        stop,
        warnings,
    };
    Ok(RunOutcome {
        objective: incumbent.objective,
        x: incumbent.x,
        trace,
        elapsed: started.elapsed(),
        epoch_times,
    })
}
