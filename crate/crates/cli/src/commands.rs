use std::fmt::Display;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::time::Instant;

use clap::Args;
use hqubo::{Qubo, SolverConfig, StopReason, Variant};
use hqubo_bench::harness::{median, write_trace, RunResult};
use hqubo_bench::{
    load, run_algorithm, run_benchmark, write_report, Algorithm, BenchConfig, BenchError,
    BenchReport, ReferenceTable, RunRecord,
};

use crate::settings::{parse_schedule, CommonArgs, Settings};
use crate::CliError;

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated: full, no_sm, no_im, random_subqubo, d2ts (default: all)
    #[arg(long)]
    pub algorithms: Option<String>,
    /// Runs per (instance, algorithm) [default: 10]
    #[arg(long)]
    pub repetitions: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Parameter to sweep: c (tenure), z, alpha, w1, w2, w3, annealer, m,
    /// patience, sweeps, backend
    #[arg(long)]
    pub param: String,
    /// Comma-separated values
    #[arg(long)]
    pub values: String,
    /// Runs per value and instance [default: 1]
    #[arg(long)]
    pub repetitions: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct AblateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Runs per (instance, variant) [default: 1]
    #[arg(long)]
    pub repetitions: Option<usize>,
}

/// Collects `key=value` lines for stdout.
#[derive(Default)]
struct Lines(Vec<String>);

impl Lines {
    fn put(&mut self, key: impl Display, value: impl Display) {
        self.0.push(format!("{key}={value}"));
    }

    fn print(self) {
        let mut out = std::io::stdout().lock();
        for line in self.0 {
            let _ = writeln!(out, "{line}");
        }
    }
}

fn note(settings: &Settings, message: impl Display) {
    if !settings.porcelain {
        eprintln!("{message}");
    }
}

fn wall_time(settings: &Settings, started: Instant) {
    let secs = started.elapsed().as_secs_f64();
    if settings.porcelain {
        eprintln!("wall_seconds={secs:.3}");
    } else {
        eprintln!("wall time {secs:.3} s");
    }
}

fn opt<T: Display>(v: Option<T>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Patience => "patience",
        StopReason::EpochCap => "epoch_cap",
    }
}

fn output_error(path: &Path) -> impl Fn(BenchError) -> CliError + '_ {
    move |e| CliError::Output(format!("{}: {e}", path.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Loads every instance file and selects the requested problem, if any.
fn load_problems(settings: &Settings) -> Result<Vec<Qubo>, CliError> {
    if settings.instances.is_empty() {
        return Err(CliError::Usage(
            "no instance given (use --instance PATH)".into(),
        ));
    }
    let mut problems = Vec::new();
    for path in &settings.instances {
        let file = load(path, settings.format).map_err(|e| match e {
            BenchError::Io(e) => CliError::Input(format!("{}: {e}", path.display())),
            other => CliError::Parse(format!("{}: {other}", path.display())),
        })?;
        for w in &file.warnings {
            note(settings, format!("warning: {}: {w}", path.display()));
        }
        match settings.problem {
            None => problems.extend(file.problems),
            Some(k) => {
                let count = file.problems.len();
                let p = file.problems.into_iter().nth(k - 1).ok_or_else(|| {
                    CliError::Usage(format!(
                        "{} holds {count} problem(s); --problem {k} is out of range",
                        path.display()
                    ))
                })?;
                problems.push(p);
            }
        }
    }
    Ok(problems)
}

fn references(settings: &Settings) -> Result<ReferenceTable, CliError> {
    let mut table = ReferenceTable::builtin();
    if let Some(path) = &settings.references {
        let f = fs::File::open(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let extra = ReferenceTable::from_csv(f)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        table.extend(extra);
    }
    Ok(table)
}

fn bench_config(
    settings: &Settings,
    solver: SolverConfig,
    default_repetitions: usize,
) -> BenchConfig {
    BenchConfig::matched(solver, settings.repetitions.unwrap_or(default_repetitions))
}

/// Runs `f` on a pool of `settings.workers` threads (0: the global pool).
fn pooled<T: Send>(
    settings: &Settings,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    if settings.workers == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers)
        .build()
        .map_err(|e| CliError::Usage(format!("workers: {e}")))?
        .install(f)
}

fn warn_run(settings: &Settings, results: &[RunResult]) {
    for r in results {
        for w in &r.trace.warnings {
            note(
                settings,
                format!("warning: {} {}: {w}", r.record.instance, r.record.algorithm),
            );
        }
    }
}

pub fn solve(args: &SolveArgs) -> Result<(), CliError> {
    let mut settings = Settings::resolve(&args.common, None)?;
    settings.problem = settings.problem.or(Some(1));
    if settings.instances.len() != 1 {
        return Err(CliError::Usage("solve takes exactly one --instance".into()));
    }
    let problem = load_problems(&settings)?.remove(0);
    let references = references(&settings)?;
    let started = Instant::now();

    let cfg = bench_config(&settings, settings.solver.clone(), 1);
    let algorithm = Algorithm::Solver(settings.solver.variant);
    let out = pooled(&settings, || {
        Ok(run_algorithm(
            &problem,
            algorithm,
            &cfg,
            settings.solver.seed,
        )?)
    })?;
    let reference = references.get(problem.name());
    let record = RunRecord {
        instance: problem.name().to_string(),
        algorithm: algorithm.name().to_string(),
        label: String::new(),
        repetition: 0,
        seed: settings.solver.seed,
        best: out.objective,
        reference,
        success: reference.map(|r| out.objective <= r),
        epochs_to_best: out.trace.epochs_to_best,
        epochs_run: out.trace.epochs.len(),
        stop: out.trace.stop,
        trace_file: "trace.jsonl".into(),
    };

    let dir = &settings.out;
    create_dir(dir)?;
    write_trace(&dir.join("trace.jsonl"), &record, &out.trace).map_err(output_error(dir))?;
    write_file(&dir.join("config.txt"), &settings.snapshot())?;
    let bits: String = out.x.iter().map(|&b| if b { '1' } else { '0' }).collect();
    write_file(&dir.join("solution.txt"), &(bits + "\n"))?;
    let mut series = String::from("epoch,best\n");
    for (epoch, best) in out.trace.best_series().iter().enumerate() {
        series.push_str(&format!("{epoch},{best}\n"));
    }
    write_file(&dir.join("series.csv"), &series)?;

    for w in &out.trace.warnings {
        note(&settings, format!("warning: {w}"));
    }
    let mut lines = Lines::default();
    lines.put("instance", problem.name());
    lines.put("n", problem.n());
    lines.put("algorithm", algorithm.name());
    lines.put("seed", settings.solver.seed);
    lines.put("initial_best", out.trace.initial_best);
    lines.put("best", out.objective);
    lines.put("epochs", record.epochs_run);
    lines.put("epochs_to_best", record.epochs_to_best);
    lines.put("stop", stop_name(record.stop));
    lines.put("reference", opt(reference));
    lines.put("success", opt(record.success));
    lines.put("out", dir.display());
    lines.print();
    wall_time(&settings, started);
    Ok(())
}

fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<Algorithm>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

fn summary_lines(lines: &mut Lines, prefix: &str, report: &BenchReport) {
    for s in &report.summary {
        let key = format!("{prefix}{}.{}", s.instance, s.algorithm);
        lines.put(format!("{key}.runs"), s.runs);
        lines.put(format!("{key}.success_rate"), &s.success_rate);
        lines.put(format!("{key}.best"), opt(s.best));
        lines.put(format!("{key}.median_best"), opt(s.median_best));
        lines.put(
            format!("{key}.median_epochs_to_best"),
            opt(s.median_epochs_to_best),
        );
    }
}

pub fn bench(args: &BenchArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.common, args.repetitions)?;
    let algorithms = match &args.algorithms {
        Some(list) => parse_algorithms(list)?,
        None => Algorithm::ALL.to_vec(),
    };
    if algorithms.is_empty() {
        return Err(CliError::Usage("--algorithms is empty".into()));
    }
    let problems = load_problems(&settings)?;
    let references = references(&settings)?;
    let started = Instant::now();
    let cfg = bench_config(&settings, settings.solver.clone(), 10);
    let (report, results) = pooled(&settings, || {
        Ok(run_benchmark(&problems, &algorithms, &cfg, &references)?)
    })?;
    warn_run(&settings, &results);

    let dir = &settings.out;
    write_report(dir, &report, &results).map_err(output_error(dir))?;
    let mut snapshot = settings.snapshot();
    snapshot.push_str(&format!("repetitions={}\n", cfg.repetitions));
    write_file(&dir.join("config.txt"), &snapshot)?;

    let mut lines = Lines::default();
    lines.put("runs", report.runs.len());
    summary_lines(&mut lines, "", &report);
    lines.put("out", dir.display());
    lines.print();
    note(
        &settings,
        format!("wrote {}", dir.join("summary.csv").display()),
    );
    wall_time(&settings, started);
    Ok(())
}

/// Applies one sweep value to a solver configuration.
pub fn apply_param(solver: &mut SolverConfig, param: &str, value: &str) -> Result<(), CliError> {
    fn num<T: std::str::FromStr>(param: &str, value: &str) -> Result<T, CliError> {
        value
            .parse()
            .map_err(|_| CliError::Usage(format!("invalid value {value:?} for {param}")))
    }
    match param {
        "c" | "tenure" => solver.tenure = Some(num(param, value)?),
        "z" => solver.z = num(param, value)?,
        "alpha" => solver.alpha = Some(num(param, value)?),
        "w1" => solver.weights.w1 = num(param, value)?,
        "w2" => solver.weights.w2 = num(param, value)?,
        "w3" => solver.weights.w3 = num(param, value)?,
        "annealer" => solver.schedule = parse_schedule(value)?,
        "m" | "machine-size" => solver.backend.machine_size = num(param, value)?,
        "patience" => solver.patience = num(param, value)?,
        "sweeps" => solver.backend.sweeps = num(param, value)?,
        "backend" => {
            solver.backend.kind = value.parse().map_err(|e| CliError::Usage(format!("{e}")))?
        }
        other => {
            return Err(CliError::Usage(format!(
                "unknown sweep parameter {other:?}"
            )))
        }
    }
    solver
        .validate()
        .map_err(|e| CliError::Usage(format!("{param}={value}: {e}")))
}

fn dir_name(value: &str) -> String {
    value
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

pub fn sweep(args: &SweepArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.common, args.repetitions)?;
    let values: Vec<&str> = args
        .values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(CliError::Usage("--values is empty".into()));
    }
    // Reject bad parameters and values before any work is done.
    let configs = values
        .iter()
        .map(|v| {
            let mut solver = settings.solver.clone();
            apply_param(&mut solver, &args.param, v)?;
            Ok((v.to_string(), solver))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let problems = load_problems(&settings)?;
    let references = references(&settings)?;
    let started = Instant::now();
    let dir = &settings.out;
    create_dir(dir)?;

    let mut rows = csv::Writer::from_writer(Vec::new());
    rows.write_record([
        "param",
        "value",
        "instance",
        "repetition",
        "seed",
        "best",
        "reference",
        "success",
        "epochs_to_best",
        "epochs_run",
        "stop",
    ])
    .map_err(|e| CliError::Output(e.to_string()))?;
    let mut series = csv::Writer::from_writer(Vec::new());
    series
        .write_record(["param", "value", "instance", "repetition", "epoch", "best"])
        .map_err(|e| CliError::Output(e.to_string()))?;
    let mut lines = Lines::default();
    lines.put("param", &args.param);

    for (value, solver) in &configs {
        let algorithm = Algorithm::Solver(solver.variant);
        let cfg = bench_config(&settings, solver.clone(), 1);
        let (report, results) = pooled(&settings, || {
            Ok(run_benchmark(&problems, &[algorithm], &cfg, &references)?)
        })?;
        warn_run(&settings, &results);
        let sub = dir.join(format!("{}-{}", dir_name(&args.param), dir_name(value)));
        write_report(&sub, &report, &results).map_err(output_error(&sub))?;

        for r in &results {
            let rec = &r.record;
            rows.write_record([
                args.param.clone(),
                value.clone(),
                rec.instance.clone(),
                rec.repetition.to_string(),
                rec.seed.to_string(),
                rec.best.to_string(),
                rec.reference.map(|v| v.to_string()).unwrap_or_default(),
                rec.success.map(|v| v.to_string()).unwrap_or_default(),
                rec.epochs_to_best.to_string(),
                rec.epochs_run.to_string(),
                stop_name(rec.stop).to_string(),
            ])
            .map_err(|e| CliError::Output(e.to_string()))?;
            for (epoch, best) in r.trace.best_series().into_iter().enumerate() {
                series
                    .write_record([
                        args.param.clone(),
                        value.clone(),
                        rec.instance.clone(),
                        rec.repetition.to_string(),
                        epoch.to_string(),
                        best.to_string(),
                    ])
                    .map_err(|e| CliError::Output(e.to_string()))?;
            }
        }
        for s in &report.summary {
            let key = format!("sweep.{value}.{}", s.instance);
            lines.put(format!("{key}.success_rate"), &s.success_rate);
            lines.put(format!("{key}.best"), opt(s.best));
            lines.put(format!("{key}.median_best"), opt(s.median_best));
            lines.put(
                format!("{key}.median_epochs_to_best"),
                opt(s.median_epochs_to_best),
            );
        }
    }

    let finish =
        |w: csv::Writer<Vec<u8>>| w.into_inner().map_err(|e| CliError::Output(e.to_string()));
    let rows = finish(rows)?;
    let series = finish(series)?;
    fs::write(dir.join("sweep.csv"), rows).map_err(|e| CliError::Output(e.to_string()))?;
    fs::write(dir.join("sweep_series.csv"), series).map_err(|e| CliError::Output(e.to_string()))?;
    let mut snapshot = settings.snapshot();
    snapshot.push_str(&format!(
        "# sweep --param {} --values {}\n",
        args.param, args.values
    ));
    write_file(&dir.join("config.txt"), &snapshot)?;

    lines.put("out", dir.display());
    lines.print();
    wall_time(&settings, started);
    Ok(())
}

/// Per-run objective gap of an ablation study. The reference is the known
/// optimum when available, otherwise the best objective any variant found.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub instance: String,
    pub algorithm: String,
    pub repetition: usize,
    pub seed: u64,
    pub best: i64,
    pub reference: i64,
    pub reference_kind: &'static str,
    pub gap: i64,
    pub epochs_to_best: usize,
    /// Best objective of the random starting solutions (shared by variants
    /// run on the same seed).
    pub sampled_best: Option<i64>,
}

pub fn gaps(runs: &[RunRecord]) -> Vec<GapRow> {
    runs.iter()
        .map(|r| {
            let (reference, kind) = match r.reference {
                Some(v) => (v, "known"),
                None => (
                    runs.iter()
                        .filter(|o| o.instance == r.instance)
                        .map(|o| o.best)
                        .min()
                        .unwrap_or(r.best),
                    "best_found",
                ),
            };
            GapRow {
                instance: r.instance.clone(),
                algorithm: r.algorithm.clone(),
                repetition: r.repetition,
                seed: r.seed,
                best: r.best,
                reference,
                reference_kind: kind,
                gap: r.best - reference,
                epochs_to_best: r.epochs_to_best,
                sampled_best: None,
            }
        })
        .collect()
}

/// Median gap per (instance, algorithm), in first-appearance order.
pub fn median_gaps(rows: &[GapRow]) -> Vec<(String, String, f64)> {
    let mut keys: Vec<(String, String)> = Vec::new();
    for r in rows {
        let key = (r.instance.clone(), r.algorithm.clone());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .map(|(instance, algorithm)| {
            let mut g: Vec<f64> = rows
                .iter()
                .filter(|r| r.instance == instance && r.algorithm == algorithm)
                .map(|r| r.gap as f64)
                .collect();
            let m = median(&mut g).unwrap_or(0.0);
            (instance, algorithm, m)
        })
        .collect()
}

pub fn ablate(args: &AblateArgs) -> Result<(), CliError> {
    let settings = Settings::resolve(&args.common, args.repetitions)?;
    let problems = load_problems(&settings)?;
    let references = references(&settings)?;
    let started = Instant::now();
    let algorithms: Vec<Algorithm> = Variant::ALL.iter().map(|&v| Algorithm::Solver(v)).collect();
    let cfg = bench_config(&settings, settings.solver.clone(), 1);
    let (report, results) = pooled(&settings, || {
        Ok(run_benchmark(&problems, &algorithms, &cfg, &references)?)
    })?;
    warn_run(&settings, &results);

    let dir = &settings.out;
    write_report(dir, &report, &results).map_err(output_error(dir))?;
    let mut rows = gaps(&report.runs);
    for (row, r) in rows.iter_mut().zip(&results) {
        row.sampled_best = r.trace.sampled.iter().copied().min();
    }
    let mut csv = String::from(
        "instance,algorithm,repetition,seed,sampled_best,best,reference,reference_kind,gap,epochs_to_best\n",
    );
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.algorithm,
            r.repetition,
            r.seed,
            opt(r.sampled_best),
            r.best,
            r.reference,
            r.reference_kind,
            r.gap,
            r.epochs_to_best
        ));
    }
    write_file(&dir.join("ablation.csv"), &csv)?;
    let mut snapshot = settings.snapshot();
    snapshot.push_str(&format!("repetitions={}\n", cfg.repetitions));
    write_file(&dir.join("config.txt"), &snapshot)?;

    let medians = median_gaps(&rows);
    let mut lines = Lines::default();
    for (instance, algorithm, gap) in &medians {
        lines.put(format!("{instance}.{algorithm}.median_gap"), gap);
    }
    for variant in [Variant::NoSm, Variant::NoIm] {
        let mut wins = 0;
        for p in &problems {
            let get = |a: &str| {
                medians
                    .iter()
                    .find(|(i, alg, _)| i == p.name() && alg == a)
                    .map(|m| m.2)
            };
            if let (Some(full), Some(other)) = (get("full"), get(variant.as_str())) {
                wins += usize::from(full <= other);
            }
        }
        lines.put(
            format!("full_le_{variant}"),
            format!("{wins}/{}", problems.len()),
        );
    }
    lines.put("out", dir.display());
    lines.print();
    wall_time(&settings, started);
    Ok(())
}
