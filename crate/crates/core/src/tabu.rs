//! Tabu search over 1-flip moves with tenure memory and aspiration.
//!
//! Each iteration takes the admissible variable with the smallest 1-flip
//! delta (lowest index on ties). A variable is admissible when its tabu
//! counter is non-positive, or when flipping it would beat the best objective
//! seen so far. If nothing is admissible the global argmin is taken.
//!
//! After the flip the chosen counter is raised by the tenure and then every
//! positive counter is decremented, so a variable flipped at iteration `t`
//! is free again at `t + tenure` (without aspiration).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{QuboProblem, SolverState};
use crate::scalar::Weight;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TabuConfig {
    /// Number of iterations.
    pub alpha: usize,
    /// Tabu tenure.
    pub tenure: usize,
}

impl TabuConfig {
    pub fn new(alpha: usize, tenure: usize) -> Result<Self> {
        if tenure == 0 {
            return Err(Error::InvalidConfig(
                "tabu tenure must be at least 1".into(),
            ));
        }
        Ok(Self { alpha, tenure })
    }

    /// `alpha = 5n`, `tenure = max(1, ⌊n/150⌋)`.
    pub fn for_size(n: usize) -> Self {
        Self {
            alpha: default_alpha(n),
            tenure: default_tenure(n),
        }
    }
}

pub fn default_alpha(n: usize) -> usize {
    5 * n
}

pub fn default_tenure(n: usize) -> usize {
    (n / 150).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabuOutcome<W> {
    /// Best solution seen, including the start.
    pub x_min: Vec<bool>,
    pub ov_min: W,
    /// Number of times each variable was flipped.
    pub flip_counts: Vec<u32>,
    /// State at loop exit.
    pub x_final: Vec<bool>,
    pub final_objective: W,
}

/// One executed move, reported to observers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TabuStep<W> {
    pub iteration: usize,
    pub index: usize,
    /// The variable was tabu when selected.
    pub was_tabu: bool,
    /// The move was admitted because it beat the incumbent.
    pub aspiration: bool,
    /// Objective after the move.
    pub objective: W,
    /// Best objective after the move.
    pub best: W,
}

pub fn tabu_search<W: Weight>(
    problem: &QuboProblem<W>,
    x_start: &[bool],
    config: &TabuConfig,
) -> Result<TabuOutcome<W>> {
    tabu_search_observed(problem, x_start, config, |_| {})
}

/// [`tabu_search`] with a callback invoked after every move.
pub fn tabu_search_observed<W, F>(
    problem: &QuboProblem<W>,
    x_start: &[bool],
    config: &TabuConfig,
    mut observe: F,
) -> Result<TabuOutcome<W>>
where
    W: Weight,
    F: FnMut(&TabuStep<W>),
{
    let n = problem.n();
    if config.tenure == 0 {
        return Err(Error::InvalidConfig(
            "tabu tenure must be at least 1".into(),
        ));
    }
    let mut state = SolverState::new(problem, x_start.to_vec())?;
    let tenure = i64::try_from(config.tenure).unwrap_or(i64::MAX);
    let mut counters = vec![0i64; n];
    let mut flip_counts = vec![0u32; n];
    let mut ov_min = state.objective();
    let mut x_min = x_start.to_vec();

    for iteration in 0..config.alpha {
        let (index, was_tabu, aspiration) = select_move(&state, &counters, ov_min);
        state.flip_unchecked(problem, index);
        flip_counts[index] += 1;

        counters[index] += tenure;
        for c in counters.iter_mut() {
            if *c > 0 {
                *c -= 1;
            }
        }

        if state.objective() < ov_min {
            ov_min = state.objective();
            x_min.copy_from_slice(state.x());
        }
        observe(&TabuStep {
            iteration,
            index,
            was_tabu,
            aspiration,
            objective: state.objective(),
            best: ov_min,
        });
    }

    let final_objective = state.objective();
    Ok(TabuOutcome {
        x_min,
        ov_min,
        flip_counts,
        x_final: state.into_x(),
        final_objective,
    })
}

/// Returns `(index, was_tabu, admitted_by_aspiration)`.
fn select_move<W: Weight>(
    state: &SolverState<W>,
    counters: &[i64],
    ov_min: W,
) -> (usize, bool, bool) {
    let objective = state.objective();
    let mut best: Option<(usize, W)> = None;
    let mut fallback = 0usize;
    let deltas = state.deltas();
    for (k, (&delta, &c)) in deltas.iter().zip(counters).enumerate() {
        if delta < deltas[fallback] {
            fallback = k;
        }
        let admissible = c <= 0 || objective + delta < ov_min;
        if admissible && best.is_none_or(|(_, d)| delta < d) {
            best = Some((k, delta));
        }
    }
    match best {
        Some((k, _)) => {
            let tabu = counters[k] > 0;
            (k, tabu, tabu)
        }
        None => (fallback, counters[fallback] > 0, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_problem(seed: u64, n: usize) -> QuboProblem<i64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut triplets = Vec::new();
        for i in 0..n {
            for j in i..n {
                triplets.push((i, j, rng.random_range(-50i64..=50)));
            }
        }
        QuboProblem::from_triplets(n, triplets).unwrap()
    }

    #[test]
    fn defaults_follow_size() {
        assert_eq!(
            TabuConfig::for_size(2500),
            TabuConfig {
                alpha: 12_500,
                tenure: 16
            }
        );
        assert_eq!(TabuConfig::for_size(20).tenure, 1);
        assert!(TabuConfig::new(10, 0).is_err());
    }

    #[test]
    fn greedy_on_diagonal() {
        let p =
            QuboProblem::from_rows(&[vec![-1i64, 0, 0], vec![0, -2, 0], vec![0, 0, -3]]).unwrap();
        let mut order = Vec::new();
        let out = tabu_search_observed(&p, &[false; 3], &TabuConfig::new(3, 1).unwrap(), |s| {
            order.push(s.index)
        })
        .unwrap();
        assert_eq!(order, vec![2, 1, 0]);
        assert_eq!(out.x_final, vec![true; 3]);
        assert_eq!(out.x_min, vec![true; 3]);
        assert_eq!(out.ov_min, -6);
    }

    #[test]
    fn zero_iterations_is_identity() {
        let p = random_problem(1, 8);
        let x = vec![true, false, true, true, false, false, true, false];
        let out = tabu_search(&p, &x, &TabuConfig::new(0, 2).unwrap()).unwrap();
        assert_eq!(out.x_min, x);
        assert_eq!(out.x_final, x);
        assert!(out.flip_counts.iter().all(|&c| c == 0));
        assert_eq!(out.ov_min, p.evaluate(&x).unwrap());
    }

    #[test]
    fn incumbent_bounds_every_visited_state() {
        let p = random_problem(7, 20);
        let x0 = vec![false; 20];
        let start = p.evaluate(&x0).unwrap();
        let mut visited = vec![start];
        let mut best_seq = Vec::new();
        let out = tabu_search_observed(&p, &x0, &TabuConfig::new(400, 3).unwrap(), |s| {
            visited.push(s.objective);
            best_seq.push(s.best);
        })
        .unwrap();
        assert!(visited.iter().all(|&v| out.ov_min <= v));
        assert!(best_seq.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.ov_min, p.evaluate(&out.x_min).unwrap());
        assert_eq!(out.final_objective, p.evaluate(&out.x_final).unwrap());
        assert_eq!(out.flip_counts.iter().sum::<u32>(), 400);
    }

    #[test]
    fn tenure_respected_unless_aspiration() {
        let p = random_problem(13, 25);
        let tenure = 4;
        let mut last_flip: Vec<Option<usize>> = vec![None; 25];
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x0: Vec<bool> = (0..25).map(|_| rng.random_bool(0.5)).collect();
        tabu_search_observed(&p, &x0, &TabuConfig::new(500, tenure).unwrap(), |s| {
            if let Some(prev) = last_flip[s.index] {
                if s.iteration < prev + tenure {
                    assert!(s.was_tabu);
                    assert!(
                        s.aspiration,
                        "tabu move at {} without aspiration",
                        s.iteration
                    );
                }
            }
            last_flip[s.index] = Some(s.iteration);
        })
        .unwrap();
    }

    #[test]
    fn all_tabu_falls_back_to_global_argmin() {
        // With one variable and a long tenure every move after the first is
        // tabu; the search must keep going.
        let p = QuboProblem::from_rows(&[vec![3i64]]).unwrap();
        let out = tabu_search(&p, &[false], &TabuConfig::new(5, 10).unwrap()).unwrap();
        assert_eq!(out.flip_counts, vec![5]);
        assert_eq!(out.ov_min, 0);
        assert_eq!(out.x_min, vec![false]);
    }

    #[test]
    fn deterministic() {
        let p = random_problem(99, 40);
        let x0 = vec![false; 40];
        let cfg = TabuConfig::new(200, 2).unwrap();
        assert_eq!(
            tabu_search(&p, &x0, &cfg).unwrap(),
            tabu_search(&p, &x0, &cfg).unwrap()
        );
    }
}
