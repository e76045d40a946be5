//! Simplified reimplementations of the two comparison methods.
//!
//! Both operate on a single solution with `alpha = 20n` tabu iterations per
//! epoch, which matches the per-epoch work of the hybrid solver at its
//! defaults (`z = 4`, `alpha = 5n`). They are labeled as simplified in every
//! report; they do not reproduce the original implementations' internals.
//!
//! * [`d2ts`]: diversified tabu search. Each round runs tabu search from the
//!   current start, then perturbs the incumbent by flipping a random fraction
//!   of its variables to obtain the next start.
//! * [`random_subqubo`]: the hybrid loop with a uniformly random size-`m`
//!   subset sent to the Ising machine after each tabu phase, and no control
//!   parameters, mutation or annealer.

use std::time::Instant;

use hqubo::driver::{random_solutions, tabu_all};
use hqubo::rng::{Phase, Streams};
use hqubo::subqubo::{im_solution_set, solve_subset};
use hqubo::{
    Backend, BackendSpec, CodePaths, EpochRecord, Incumbent, Outcome, Qubo, RunTrace, StopReason,
    TabuConfig,
};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const LABEL: &str = "simplified reimplementation";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    /// Tabu iterations per epoch; `None` means `20n`.
    pub alpha: Option<usize>,
    /// Tabu tenure; `None` means `max(1, ⌊n/150⌋)`.
    pub tenure: Option<usize>,
    /// Fraction of variables flipped between diversified-tabu rounds.
    pub perturb_fraction: f64,
    pub backend: BackendSpec,
    pub patience: usize,
    pub epoch_cap: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            alpha: None,
            tenure: None,
            perturb_fraction: 0.2,
            backend: BackendSpec::default(),
            patience: 30,
            epoch_cap: 300,
            seed: 0,
        }
    }
}

impl BaselineConfig {
    fn tabu_for(&self, n: usize) -> TabuConfig {
        TabuConfig {
            alpha: self.alpha.unwrap_or(20 * n),
            tenure: self
                .tenure
                .unwrap_or_else(|| hqubo::tabu::default_tenure(n)),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.patience == 0 {
            return Err(BenchError::Config("patience must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.perturb_fraction) {
            return Err(BenchError::Config(
                "perturbation fraction must lie in [0, 1]".into(),
            ));
        }
        if self.tenure == Some(0) {
            return Err(BenchError::Config("tabu tenure must be at least 1".into()));
        }
        Ok(())
    }
}

struct Loop {
    started: Instant,
    epochs: Vec<EpochRecord<i64>>,
    epoch_times: Vec<std::time::Duration>,
    epochs_to_best: usize,
    stall: usize,
    stop: StopReason,
}

impl Loop {
    fn new() -> Self {
        Self {
            started: Instant::now(),
            epochs: Vec::new(),
            epoch_times: Vec::new(),
            epochs_to_best: 0,
            stall: 0,
            stop: StopReason::EpochCap,
        }
    }

    /// Records an epoch; returns false when patience is exhausted.
    fn record(
        &mut self,
        epoch: usize,
        best: i64,
        objective: i64,
        improved: bool,
        patience: usize,
    ) -> bool {
        self.epochs.push(EpochRecord {
            epoch,
            best,
            objectives: vec![objective],
            rate: 0.0,
            improved,
        });
        self.epoch_times.push(self.started.elapsed());
        if improved {
            self.epochs_to_best = epoch;
            self.stall = 0;
        } else {
            self.stall += 1;
            if self.stall >= patience {
                self.stop = StopReason::Patience;
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn finish(
        self,
        algorithm: &str,
        problem: &Qubo,
        seed: u64,
        machine_size: usize,
        paths: CodePaths,
        sampled: i64,
        initial: i64,
        incumbent: Incumbent<i64>,
        warnings: Vec<String>,
    ) -> Outcome {
        let trace = RunTrace {
            algorithm: algorithm.to_string(),
            problem: problem.name().to_string(),
            n: problem.n(),
            seed,
            machine_size,
            paths,
            sampled: vec![sampled],
            initial: vec![initial],
            initial_best: initial,
            epochs: self.epochs,
            best: incumbent.objective,
            epochs_to_best: self.epochs_to_best,
            stop: self.stop,
            warnings,
        };
        Outcome {
            objective: incumbent.objective,
            x: incumbent.x,
            trace,
            elapsed: self.started.elapsed(),
            epoch_times: self.epoch_times,
        }
    }
}

/// Diversified tabu search. With `epoch_cap = 1` this is one plain tabu
/// search from a random start.
pub fn d2ts(problem: &Qubo, config: &BaselineConfig) -> Result<Outcome> {
    config.validate()?;
    let n = problem.n();
    let streams = Streams::new(config.seed);
    let tabu = config.tabu_for(n);
    let mut x = random_solutions(n, 1, &streams).remove(0);
    let initial = problem.evaluate(&x)?;
    let mut incumbent = Incumbent::new(x.clone(), initial);
    let flips = ((n as f64 * config.perturb_fraction).round() as usize).clamp(1, n);

    let mut run = Loop::new();
    for epoch in 1..=config.epoch_cap {
        let out = tabu_all(problem, std::slice::from_ref(&x), &tabu, false)?.remove(0);
        let improved = incumbent.offer(&out.x_min, out.ov_min);
        if !run.record(
            epoch,
            incumbent.objective,
            out.ov_min,
            improved,
            config.patience,
        ) {
            break;
        }
        x.copy_from_slice(&incumbent.x);
        let mut rng = streams.stream(Phase::Perturbation, epoch as u64, 0);
        for k in sample(&mut rng, n, flips) {
            x[k] = !x[k];
        }
    }
    let paths = CodePaths {
        perturbation: true,
        ..CodePaths::default()
    };
    Ok(run.finish(
        "d2ts",
        problem,
        config.seed,
        0,
        paths,
        initial,
        initial,
        incumbent,
        Vec::new(),
    ))
}

/// Tabu search alternating with an Ising-machine solve of a random subset.
pub fn random_subqubo(problem: &Qubo, config: &BaselineConfig) -> Result<Outcome> {
    config.validate()?;
    let n = problem.n();
    let streams = Streams::new(config.seed);
    let tabu = config.tabu_for(n);
    let m = config.backend.machine_size.min(n);
    if m == 0 {
        return Err(BenchError::Config("machine size must be positive".into()));
    }
    let mut warnings = Vec::new();
    if m < config.backend.machine_size {
        warnings.push(format!(
            "machine size {} clamped to problem size {n}",
            config.backend.machine_size
        ));
    }
    let backend = Backend::for_problem(&config.backend, n)?;

    let mut solutions = random_solutions(n, 1, &streams);
    let sampled = problem.evaluate(&solutions[0])?;
    im_solution_set(problem, &mut solutions, &backend, m, &streams, false)?;
    let mut x = solutions.remove(0);
    let initial = problem.evaluate(&x)?;
    let mut incumbent = Incumbent::new(x.clone(), initial);

    let mut run = Loop::new();
    for epoch in 1..=config.epoch_cap {
        let out = tabu_all(problem, std::slice::from_ref(&x), &tabu, false)?.remove(0);
        let mut improved = incumbent.offer(&out.x_min, out.ov_min);
        x.copy_from_slice(&out.x_min);

        let mut rng = streams.stream(Phase::RandomSubset, epoch as u64, 0);
        let subset = sample(&mut rng, n, m).into_vec();
        let mut solve_rng = streams.stream(Phase::PartialIm, epoch as u64, 0);
        solve_subset(problem, &mut x, &subset, &backend, &mut solve_rng)?;
        let objective = problem.evaluate(&x)?;
        improved |= incumbent.offer(&x, objective);
        if !run.record(
            epoch,
            incumbent.objective,
            objective,
            improved,
            config.patience,
        ) {
            break;
        }
    }
    let paths = CodePaths {
        initial_im_pass: true,
        random_subset_im: true,
        ..CodePaths::default()
    };
    Ok(run.finish(
        "random_subqubo",
        problem,
        config.seed,
        m,
        paths,
        sampled,
        initial,
        incumbent,
        warnings,
    ))
}
