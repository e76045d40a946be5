//! Control parameters that steer subQUBO extraction and mutation.
//!
//! * `eta` (per variable): absolute column mass of `Q`, computed once.
//! * `stability` (per solution and variable): `1 − T_ij / max_j T_ij` from the
//!   tabu flip counts.
//! * `gamma` (per variable): disagreement across the solution set,
//!   `1 − |Σ_i S_ij − z/2| / (z/2)`.
//!
//! They are combined into a ranking matrix `A_i = w1·eta + w2·gamma − w3·stability_i`,
//! where `eta` is min-max normalized to `[0, 1]` so that it is commensurate
//! with the other two terms.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::qubo::QuboProblem;
use crate::scalar::{Real, Weight};

/// `eta_j = Σ_i |Q_ij|`, diagonal included.
pub fn weight_effect<W: Weight, R: Real>(problem: &QuboProblem<W>) -> Vec<R> {
    let n = problem.n();
    let mut eta = vec![0i128; n];
    for i in 0..n {
        for (acc, &q) in eta.iter_mut().zip(problem.row(i)) {
            *acc += q.widen().abs();
        }
    }
    eta.into_iter()
        .map(|v| R::from_i128(v).expect("column mass representable"))
        .collect()
}

/// Min-max normalization to `[0, 1]`. A constant vector maps to all zeros.
pub fn min_max_normalize<R: Real>(values: &[R]) -> Vec<R> {
    let Some((lo, hi)) = min_max(values) else {
        return Vec::new();
    };
    let span = hi - lo;
    if span <= R::zero() {
        return vec![R::zero(); values.len()];
    }
    values.iter().map(|&v| (v - lo) / span).collect()
}

fn min_max<R: Real>(values: &[R]) -> Option<(R, R)> {
    let first = *values.first()?;
    Some(
        values
            .iter()
            .fold((first, first), |(lo, hi), &v| (lo.min(v), hi.max(v))),
    )
}

/// Stability of one solution's variables from its tabu flip counts.
///
/// A solution whose variables never flipped is fully stable (all ones).
pub fn stability<R: Real>(flip_counts: &[u32]) -> Vec<R> {
    let max = flip_counts.iter().copied().max().unwrap_or(0);
    if max == 0 {
        return vec![R::one(); flip_counts.len()];
    }
    let max = R::from_u32(max).unwrap();
    flip_counts
        .iter()
        .map(|&t| R::one() - R::from_u32(t).unwrap() / max)
        .collect()
}

/// Per-variable disagreement across the solution set. Requires `z ≥ 1`.
pub fn deviation<R: Real>(solutions: &[Vec<bool>]) -> Vec<R> {
    assert!(
        !solutions.is_empty(),
        "deviation needs at least one solution"
    );
    let n = solutions[0].len();
    let half = R::from_usize(solutions.len()).unwrap() / R::lit(2.0);
    let mut ones = vec![0usize; n];
    for row in solutions {
        for (count, &bit) in ones.iter_mut().zip(row) {
            *count += usize::from(bit);
        }
    }
    ones.into_iter()
        .map(|c| R::one() - (R::from_usize(c).unwrap() - half).abs() / half)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlWeights<R> {
    pub w1: R,
    pub w2: R,
    pub w3: R,
}

impl<R: Real> Default for ControlWeights<R> {
    fn default() -> Self {
        Self {
            w1: R::one(),
            w2: R::one(),
            w3: R::lit(0.5),
        }
    }
}

/// The control parameters of one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams<R> {
    /// Normalized `eta`, length `n`.
    pub eta: Vec<R>,
    /// `z × n` stability matrix.
    pub stability: Vec<Vec<R>>,
    /// Length `n`.
    pub gamma: Vec<R>,
    pub weights: ControlWeights<R>,
}

impl<R: Real> ControlParams<R> {
    /// The ranking matrix `A`, one row per solution.
    pub fn aggregate(&self) -> Vec<Vec<R>> {
        let ControlWeights { w1, w2, w3 } = self.weights;
        self.stability
            .iter()
            .map(|row| {
                self.eta
                    .iter()
                    .zip(&self.gamma)
                    .zip(row)
                    .map(|((&e, &g), &d)| w1 * e + w2 * g - w3 * d)
                    .collect()
            })
            .collect()
    }
}

/// Mutation-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MutationSchedule {
    /// `r_t = 0.3·(1 + cos(πt/15))·0.99^t`.
    #[default]
    Cosine,
    Constant {
        rate: f64,
    },
    /// `r_t = max(0, start − decrement·⌊t/every⌋)`.
    Step {
        start: f64,
        decrement: f64,
        every: u32,
    },
}

impl MutationSchedule {
    pub const CONSTANT_DEFAULT: Self = Self::Constant { rate: 0.6 };
    pub const STEP_DEFAULT: Self = Self::Step {
        start: 0.6,
        decrement: 0.05,
        every: 2,
    };

    pub fn rate(&self, t: u32) -> f64 {
        match *self {
            Self::Cosine => cosine_rate(t),
            Self::Constant { rate } => rate,
            Self::Step {
                start,
                decrement,
                every,
            } => (start - decrement * f64::from(t / every.max(1))).max(0.0),
        }
    }
}

pub fn cosine_rate(t: u32) -> f64 {
    let t = f64::from(t);
    0.3 * (1.0 + (PI * t / 15.0).cos()) * 0.99f64.powf(t)
}

/// Mutation-rate annealer. `t` is never reset within a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Annealer<R> {
    schedule: MutationSchedule,
    t: u32,
    rate: R,
}

impl<R: Real> Annealer<R> {
    pub fn new(schedule: MutationSchedule) -> Self {
        Self {
            schedule,
            t: 0,
            rate: R::lit(schedule.rate(0)),
        }
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rate(&self) -> R {
        self.rate
    }

    pub fn next_rate(&mut self) -> R {
        self.t += 1;
        // Cosine can dip a hair below zero at t = 15 (mod 30) in floating point.
        self.rate = R::lit(self.schedule.rate(self.t).max(0.0));
        self.rate
    }
}

/// Indices sorted by descending score, ties by ascending index.
pub fn rank_descending<R: Real>(
    scores: &[R],
    candidates: impl IntoIterator<Item = usize>,
) -> Vec<usize> {
    let mut idx: Vec<usize> = candidates.into_iter().collect();
    idx.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

/// Size of the mutation subset for a pool of `pool` variables.
pub fn mutation_subset_size<R: Real>(pool: usize, rate: R) -> usize {
    let raw = (R::from_usize(pool).unwrap() * rate).to_f64_lossy();
    // Products such as 50 × 0.6 must floor to 30, not 29.
    ((raw + 1e-9).floor().max(0.0) as usize).min(pool)
}

/// Mutates one solution in place and returns the flipped indices.
///
/// The pool is every variable not in `excluded`; the `⌊pool·r⌋` members with
/// the highest score form the subset, and each subset member flips with its
/// min-max normalized score as probability. A singleton or constant-score
/// subset flips with probability one.
pub fn mutate_solution<R: Real, G: Rng + ?Sized>(
    x: &mut [bool],
    scores: &[R],
    rate: R,
    excluded: &[usize],
    rng: &mut G,
) -> Vec<usize> {
    let n = x.len();
    let mut blocked = vec![false; n];
    for &i in excluded {
        blocked[i] = true;
    }
    let pool: Vec<usize> = (0..n).filter(|&i| !blocked[i]).collect();
    let size = mutation_subset_size(pool.len(), rate);
    if size == 0 {
        return Vec::new();
    }
    let mut subset = rank_descending(scores, pool);
    subset.truncate(size);

    let values: Vec<R> = subset.iter().map(|&j| scores[j]).collect();
    let (lo, hi) = min_max(&values).expect("non-empty subset");
    let span = hi - lo;
    let mut flipped = Vec::new();
    for &j in &subset {
        let p = if span > R::zero() {
            ((scores[j] - lo) / span).to_f64_lossy()
        } else {
            1.0
        };
        if rng.random_bool(p.clamp(0.0, 1.0)) {
            x[j] = !x[j];
            flipped.push(j);
        }
    }
    flipped
}
