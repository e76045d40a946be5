//! Repetition harness, statistics and result files.
//!
//! Run `k` of every (instance, algorithm) pair uses seed `base_seed + k`, so
//! algorithms are compared on paired seeds and a rerun reproduces every file
//! except `timings.csv` byte for byte.
//!
//! Output layout under the chosen directory:
//!
//! | file | content |
//! |------|---------|
//! | `results.csv` | one row per run, columns of [`RunRecord`] |
//! | `summary.csv` | one row per (instance, algorithm), columns of [`Summary`] |
//! | `results.json` | `{ "runs": [...], "summary": [...] }` |
//! | `series.csv` | `instance,algorithm,repetition,epoch,best` for plotting |
//! | `traces/<instance>__<algorithm>__<k>.jsonl` | one [`TraceLine`] per epoch, epoch 0 = initialization |
//! | `timings.csv` | wall time per run (not reproducible) |

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use hqubo::{solve, Outcome, Qubo, SolverConfig, StopReason, Trace, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{self, BaselineConfig};
use crate::error::{BenchError, Result};
use crate::reference::ReferenceTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Solver(Variant),
    RandomSubqubo,
    D2ts,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Solver(Variant::Full),
        Algorithm::Solver(Variant::NoSm),
        Algorithm::Solver(Variant::NoIm),
        Algorithm::RandomSubqubo,
        Algorithm::D2ts,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Solver(v) => v.as_str(),
            Self::RandomSubqubo => "random_subqubo",
            Self::D2ts => "d2ts",
        }
    }

    /// Empty for the hybrid solver and its ablations.
    pub fn label(&self) -> &'static str {
        match self {
            Self::Solver(_) => "",
            Self::RandomSubqubo | Self::D2ts => baseline::LABEL,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random_subqubo" | "random-subqubo" | "dwave" => Ok(Self::RandomSubqubo),
            "d2ts" => Ok(Self::D2ts),
            other => other
                .parse::<Variant>()
                .map(Self::Solver)
                .map_err(|_| BenchError::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub solver: SolverConfig,
    pub baseline: BaselineConfig,
    pub repetitions: usize,
    pub base_seed: u64,
    /// Concurrent runs; 0 uses the global rayon pool.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            baseline: BaselineConfig::default(),
            repetitions: 10,
            base_seed: 0,
            workers: 0,
        }
    }
}

impl BenchConfig {
    /// Baseline settings that share the solver's budget, backend and patience.
    pub fn matched(solver: SolverConfig, repetitions: usize) -> Self {
        let baseline = BaselineConfig {
            backend: solver.backend,
            patience: solver.patience,
            epoch_cap: solver.epoch_cap,
            tenure: solver.tenure,
            ..BaselineConfig::default()
        };
        Self {
            base_seed: solver.seed,
            solver,
            baseline,
            repetitions,
            workers: 0,
        }
    }
}

/// Runs one algorithm once with the given seed.
pub fn run_algorithm(
    problem: &Qubo,
    algorithm: Algorithm,
    config: &BenchConfig,
    seed: u64,
) -> Result<Outcome> {
    match algorithm {
        Algorithm::Solver(variant) => {
            let cfg = SolverConfig {
                seed,
                variant,
                ..config.solver.clone()
            };
            Ok(solve(problem, &cfg)?)
        }
        Algorithm::RandomSubqubo => baseline::random_subqubo(
            problem,
            &BaselineConfig {
                seed,
                ..config.baseline.clone()
            },
        ),
        Algorithm::D2ts => baseline::d2ts(
            problem,
            &BaselineConfig {
                seed,
                ..config.baseline.clone()
            },
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: String,
    pub label: String,
    pub repetition: usize,
    pub seed: u64,
    pub best: i64,
    pub reference: Option<i64>,
    pub success: Option<bool>,
    pub epochs_to_best: usize,
    pub epochs_run: usize,
    pub stop: StopReason,
    pub trace_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub instance: String,
    pub algorithm: String,
    pub runs: usize,
    /// `None` when the instance has no reference optimum.
    pub successes: Option<usize>,
    /// `"k/runs"` or `"n/a"`.
    pub success_rate: String,
    pub median_epochs_to_best: Option<f64>,
    pub best: Option<i64>,
    pub median_best: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub runs: Vec<RunRecord>,
    pub summary: Vec<Summary>,
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceLine {
    pub instance: String,
    pub algorithm: String,
    pub repetition: usize,
    pub epoch: usize,
    pub best: i64,
    pub objectives: Vec<i64>,
    /// Mutation rate; absent for the initialization record.
    pub rate: Option<f64>,
    pub improved: bool,
}

/// A finished run together with its trace.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub record: RunRecord,
    pub trace: Trace,
    pub elapsed_secs: f64,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    })
}

pub fn trace_file_name(instance: &str, algorithm: &str, repetition: usize) -> String {
    let safe: String = instance
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("traces/{safe}__{algorithm}__{repetition}.jsonl")
}

/// Runs every (instance, algorithm, repetition) triple.
pub fn run_benchmark(
    instances: &[Qubo],
    algorithms: &[Algorithm],
    config: &BenchConfig,
    references: &ReferenceTable,
) -> Result<(BenchReport, Vec<RunResult>)> {
    let jobs: Vec<(usize, Algorithm, usize)> = instances
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            algorithms
                .iter()
                .flat_map(move |&a| (0..config.repetitions).map(move |k| (i, a, k)))
        })
        .collect();

    let run_job = |&(i, algorithm, k): &(usize, Algorithm, usize)| -> Result<RunResult> {
        let problem = &instances[i];
        let seed = config.base_seed.wrapping_add(k as u64);
        let out = run_algorithm(problem, algorithm, config, seed)?;
        let reference = references.get(problem.name());
        let record = RunRecord {
            instance: problem.name().to_string(),
            algorithm: algorithm.name().to_string(),
            label: algorithm.label().to_string(),
            repetition: k,
            seed,
            best: out.objective,
            reference,
            success: reference.map(|r| out.objective <= r),
            epochs_to_best: out.trace.epochs_to_best,
            epochs_run: out.trace.epochs.len(),
            stop: out.trace.stop,
            trace_file: trace_file_name(problem.name(), algorithm.name(), k),
        };
        Ok(RunResult {
            record,
            trace: out.trace,
            elapsed_secs: out.elapsed.as_secs_f64(),
        })
    };

    let results: Vec<RunResult> = if config.workers > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(run_job).collect::<Result<Vec<_>>>())?
    } else {
        jobs.par_iter().map(run_job).collect::<Result<Vec<_>>>()?
    };

    let runs: Vec<RunRecord> = results.iter().map(|r| r.record.clone()).collect();
    let summary = summarize(&runs);
    Ok((BenchReport { runs, summary }, results))
}

/// Aggregates per-run records, in first-appearance order of (instance, algorithm).
pub fn summarize(runs: &[RunRecord]) -> Vec<Summary> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in runs {
        let key = (r.instance.as_str(), r.algorithm.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(instance, algorithm)| {
            let group: Vec<&RunRecord> = runs
                .iter()
                .filter(|r| r.instance == instance && r.algorithm == algorithm)
                .collect();
            let successes = group
                .iter()
                .map(|r| r.success)
                .collect::<Option<Vec<bool>>>()
                .map(|s| s.into_iter().filter(|&ok| ok).count());
            let success_rate = match successes {
                Some(k) => format!("{k}/{}", group.len()),
                None => "n/a".to_string(),
            };
            let mut epochs: Vec<f64> = group.iter().map(|r| r.epochs_to_best as f64).collect();
            let mut bests: Vec<f64> = group.iter().map(|r| r.best as f64).collect();
            Summary {
                instance: instance.to_string(),
                algorithm: algorithm.to_string(),
                runs: group.len(),
                successes,
                success_rate,
                median_epochs_to_best: median(&mut epochs),
                best: group.iter().map(|r| r.best).min(),
                median_best: median(&mut bests),
            }
        })
        .collect()
}

pub fn trace_lines(record: &RunRecord, trace: &Trace) -> Vec<TraceLine> {
    let init = TraceLine {
        instance: record.instance.clone(),
        algorithm: record.algorithm.clone(),
        repetition: record.repetition,
        epoch: 0,
        best: trace.initial_best,
        objectives: trace.initial.clone(),
        rate: None,
        improved: false,
    };
    std::iter::once(init)
        .chain(trace.epochs.iter().map(|e| TraceLine {
            instance: record.instance.clone(),
            algorithm: record.algorithm.clone(),
            repetition: record.repetition,
            epoch: e.epoch,
            best: e.best,
            objectives: e.objectives.clone(),
            rate: Some(e.rate),
            improved: e.improved,
        }))
        .collect()
}

pub fn write_trace(path: &Path, record: &RunRecord, trace: &Trace) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    for line in trace_lines(record, trace) {
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub const RESULTS_COLUMNS: [&str; 12] = [
    "instance",
    "algorithm",
    "label",
    "repetition",
    "seed",
    "best",
    "reference",
    "success",
    "epochs_to_best",
    "epochs_run",
    "stop",
    "trace_file",
];

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "instance",
    "algorithm",
    "runs",
    "successes",
    "success_rate",
    "median_epochs_to_best",
    "best",
    "median_best",
];

/// Writes every output file of a benchmark into `dir`.
pub fn write_report(dir: &Path, report: &BenchReport, results: &[RunResult]) -> Result<()> {
    fs::create_dir_all(dir.join("traces"))?;
    write_csv(&dir.join("results.csv"), &report.runs, &RESULTS_COLUMNS)?;
    write_csv(&dir.join("summary.csv"), &report.summary, &SUMMARY_COLUMNS)?;
    let json = serde_json::to_string_pretty(report)?;
    fs::write(dir.join("results.json"), json + "\n")?;

    let mut series = csv::Writer::from_path(dir.join("series.csv"))?;
    series.write_record(["instance", "algorithm", "repetition", "epoch", "best"])?;
    let mut timings = csv::Writer::from_path(dir.join("timings.csv"))?;
    timings.write_record(["instance", "algorithm", "repetition", "wall_seconds"])?;
    for r in results {
        write_trace(&dir.join(&r.record.trace_file), &r.record, &r.trace)?;
        for (epoch, best) in r.trace.best_series().into_iter().enumerate() {
            series.write_record([
                r.record.instance.clone(),
                r.record.algorithm.clone(),
                r.record.repetition.to_string(),
                epoch.to_string(),
                best.to_string(),
            ])?;
        }
        timings.write_record([
            r.record.instance.clone(),
            r.record.algorithm.clone(),
            r.record.repetition.to_string(),
            format!("{:.3}", r.elapsed_secs),
        ])?;
    }
    series.flush()?;
    timings.flush()?;
    Ok(())
}
