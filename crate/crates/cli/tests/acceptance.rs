//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion does not pass.
//!
//! Criteria on the OR-Library `bqp2500` set need the instance file, which is
//! not redistributed here. Point `HQUBO_BQP2500` at it (or place it at
//! `data/bqp2500.txt` in the workspace root); without it those criteria are
//! reported as BLOCKED and count as failures. `HQUBO_ACCEPTANCE_REPS`
//! (default 10) sets the repetitions for the bqp2500 comparisons, and
//! `HQUBO_ACCEPTANCE_ONLY=1,4,11` restricts the run to the listed criteria.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hqubo::control::cosine_rate;
use hqubo::ising::spins_from_bits;
use hqubo::{
    build_subqubo, solve, to_ising, Annealer, BackendSpec, ExactIsing, ExactSolver,
    MutationSchedule, Qubo, SolverConfig, State, Variant,
};
use hqubo_bench::harness::median;
use hqubo_bench::instance::GeneratorMeta;
use hqubo_bench::{
    load, run_algorithm, run_benchmark, write_orlib, write_palubeckis, write_report, Algorithm,
    BenchConfig, ReferenceTable, RunRecord, SourceFormat,
};
use num_rational::Rational64;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

enum Status {
    Pass,
    Fail,
    Blocked,
}

struct Verdict {
    status: Status,
    detail: String,
}

impl Verdict {
    fn check(ok: bool, detail: impl Into<String>) -> Self {
        Self {
            status: if ok { Status::Pass } else { Status::Fail },
            detail: detail.into(),
        }
    }

    fn blocked(detail: impl Into<String>) -> Self {
        Self {
            status: Status::Blocked,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::Blocked => "BLOCKED",
        })
    }
}

// ---------------------------------------------------------------------------
// Independent oracles: plain dense-matrix arithmetic, no library code.

type Dense = Vec<Vec<i64>>;

#[allow(clippy::needless_range_loop)]
fn random_dense(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> Dense {
    let mut q = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i..n {
            let v = rng.random_range(-bound..=bound);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    q
}

fn naive_objective(q: &Dense, x: &[bool]) -> i64 {
    let mut f = 0;
    for i in 0..q.len() {
        for j in 0..q.len() {
            if x[i] && x[j] {
                f += q[i][j];
            }
        }
    }
    f
}

fn naive_delta(q: &Dense, x: &[bool], k: usize) -> i64 {
    let coupled: i64 = (0..q.len())
        .filter(|&j| j != k && x[j])
        .map(|j| q[j][k])
        .sum();
    let sign = if x[k] { -1 } else { 1 };
    sign * (q[k][k] + 2 * coupled)
}

fn bits(code: u32, n: usize) -> Vec<bool> {
    (0..n).map(|k| code >> k & 1 == 1).collect()
}

fn brute_force(q: &Dense) -> i64 {
    (0..1u32 << q.len())
        .map(|c| naive_objective(q, &bits(c, q.len())))
        .min()
        .unwrap()
}

fn matrix_of(p: &Qubo) -> Dense {
    (0..p.n()).map(|i| p.row(i).to_vec()).collect()
}

fn random_bits(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(0.5)).collect()
}

// ---------------------------------------------------------------------------

fn oracle_equivalence() -> Verdict {
    let started = Instant::now();
    let mut hits = 0;
    let mut misses = Vec::new();
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + case);
        let n = rng.random_range(1..=20);
        let q = random_dense(&mut rng, n, 50);
        let p = Qubo::from_rows(&q).unwrap();
        let cfg = SolverConfig {
            seed: case,
            ..SolverConfig::default()
        };
        let out = solve(&p, &cfg).unwrap();
        assert_eq!(
            naive_objective(&q, &out.x),
            out.objective,
            "reported objective is wrong"
        );
        if out.objective == brute_force(&q) {
            hits += 1;
        } else {
            misses.push(case);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    Verdict::check(
        hits >= 95 && secs < 60.0,
        format!("{hits}/100 runs reached the enumerated optimum (need >= 95) in {secs:.1} s (limit 60 s); misses {misses:?}"),
    )
}

fn delta_exactness() -> Verdict {
    let started = Instant::now();
    let n = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let q = random_dense(&mut rng, n, 100);
    let p = Qubo::from_rows(&q).unwrap();
    let mut x = random_bits(&mut rng, n);
    let mut state = State::new(&p, x.clone()).unwrap();
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let i = rng.random_range(0..n);
        state.apply_flip(&p, i).unwrap();
        x[i] = !x[i];
        let f = naive_objective(&q, &x);
        mismatches += usize::from(state.x() != x.as_slice() || state.objective() != f);
        mismatches += (0..n)
            .filter(|&k| state.deltas()[k] != naive_delta(&q, &x, k))
            .count();
        // One delta per step against the definition f(x with k flipped) - f(x).
        let k = rng.random_range(0..n);
        x[k] = !x[k];
        let moved = naive_objective(&q, &x);
        x[k] = !x[k];
        mismatches += usize::from(state.deltas()[k] != moved - f);
    }
    let secs = started.elapsed().as_secs_f64();
    Verdict::check(
        mismatches == 0 && secs < 10.0,
        format!("10000 flips on n=200: {mismatches} mismatches in objective/deltas, {secs:.2} s (limit 10 s)"),
    )
}

fn subqubo_bias() -> Verdict {
    let started = Instant::now();
    let mut failures = 0usize;
    for case in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3_000 + case);
        let q = random_dense(&mut rng, 30, 100);
        let p = Qubo::from_rows(&q).unwrap();
        let x = random_bits(&mut rng, 30);
        let subset = sample(&mut rng, 30, 8).into_vec();
        let sub = build_subqubo(&p, &x, &subset).unwrap();
        let mut full = Vec::with_capacity(256);
        let mut reduced = Vec::with_capacity(256);
        for code in 0..256u32 {
            let y = bits(code, 8);
            let mut embedded = x.clone();
            for (&i, &v) in subset.iter().zip(&y) {
                embedded[i] = v;
            }
            full.push(naive_objective(&q, &embedded));
            reduced.push(sub.evaluate(&y).unwrap());
            failures += usize::from(reduced[code as usize] + sub.offset() != full[code as usize]);
        }
        for a in 0..256 {
            for b in 0..256 {
                failures += usize::from(reduced[a] - reduced[b] != full[a] - full[b]);
            }
        }
    }
    let secs = started.elapsed().as_secs_f64();
    Verdict::check(
        failures == 0 && secs < 10.0,
        format!("50 cases x 2^8 assignments (and all pairs): {failures} violations, {secs:.2} s (limit 10 s)"),
    )
}

fn ising_transform() -> Verdict {
    let mut failures = 0usize;
    let mut checked = 0usize;
    for case in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(4_000 + case);
        let n = rng.random_range(1..=12);
        let q = random_dense(&mut rng, n, 100);
        let p = Qubo::from_rows(&q).unwrap();
        let ising: ExactIsing = to_ising(&p);
        for code in 0..1u32 << n {
            let x = bits(code, n);
            let s = spins_from_bits(&x);
            // E(s) = -sum_ij J_ij s_i s_j - sum_i h_i s_i, from the exported terms.
            let mut e = Rational64::from_integer(0);
            for i in 0..n {
                for j in 0..n {
                    e -= *ising.coupling(i, j) * i64::from(s[i] * s[j]);
                }
                e -= ising.fields()[i] * i64::from(s[i]);
            }
            let f = Rational64::from_integer(naive_objective(&q, &x));
            failures += usize::from(e + ising.offset() != f || ising.energy(&s) != e);
            checked += 1;
        }
    }
    Verdict::check(
        failures == 0,
        format!("{checked} assignments over 20 instances (n <= 12): {failures} violations of E(2x-1) + offset == f(x)"),
    )
}

fn exact_backend() -> Verdict {
    let started = Instant::now();
    let solver = ExactSolver::new(16).unwrap();
    let mut failures = 0usize;
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(5_000 + case);
        let q = random_dense(&mut rng, 40, 100);
        let p = Qubo::from_rows(&q).unwrap();
        let x = random_bits(&mut rng, 40);
        let subset = sample(&mut rng, 40, 16).into_vec();
        let sub = build_subqubo(&p, &x, &subset).unwrap();
        let qs = matrix_of(sub.qubo());
        let (mut best, mut first) = (i64::MAX, 0u32);
        for code in 0..1u32 << 16 {
            let v = naive_objective(&qs, &bits(code, 16));
            if v < best {
                best = v;
                first = code;
            }
        }
        let y = solver.minimize(sub.qubo()).unwrap();
        failures += usize::from(naive_objective(&qs, &y) != best || y != bits(first, 16));
    }
    let secs = started.elapsed().as_secs_f64();
    Verdict::check(
        failures == 0,
        format!("100 subproblems with m=16: {failures} disagreements with a naive 2^16 scan ({secs:.1} s)"),
    )
}

fn annealer_values() -> Verdict {
    let r0 = cosine_rate(0);
    let r15 = cosine_rate(15);
    let mut out_of_range = Vec::new();
    let mut annealer = Annealer::<f64>::new(MutationSchedule::Cosine);
    let mut drift = 0usize;
    for t in 0..=200u32 {
        let r = cosine_rate(t);
        if !(0.0..=0.6 * 0.99f64.powf(f64::from(t))).contains(&r) {
            out_of_range.push(t);
        }
        drift += usize::from(annealer.rate() != r);
        annealer.next_rate();
    }
    Verdict::check(
        (r0 - 0.6).abs() <= 1e-12 && r15.abs() <= 1e-12 && out_of_range.is_empty() && drift == 0,
        format!(
            "r_0 = {r0}, r_15 = {r15:e}, t in 0..=200 outside [0, 0.6*0.99^t]: {out_of_range:?}, annealer drift {drift}"
        ),
    )
}

// ---------------------------------------------------------------------------
// bqp2500 criteria

fn bqp2500_path() -> Option<PathBuf> {
    let candidates = [
        std::env::var_os("HQUBO_BQP2500").map(PathBuf::from),
        Some(Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/bqp2500.txt")),
    ];
    candidates.into_iter().flatten().find(|p| p.is_file())
}

fn bqp2500() -> Result<Vec<Qubo>, Verdict> {
    let Some(path) = bqp2500_path() else {
        return Err(Verdict::blocked(
            "bqp2500 instance file not available (set HQUBO_BQP2500 or place it at data/bqp2500.txt)",
        ));
    };
    match load(&path, SourceFormat::OrlibMulti) {
        Ok(file) if file.problems.len() == 10 => Ok(file.problems),
        Ok(file) => Err(Verdict::check(
            false,
            format!(
                "{} holds {} problems, expected 10",
                path.display(),
                file.problems.len()
            ),
        )),
        Err(e) => Err(Verdict::check(false, format!("{}: {e}", path.display()))),
    }
}

fn repetitions() -> usize {
    std::env::var("HQUBO_ACCEPTANCE_REPS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(10)
}

fn q1_reproduction() -> Verdict {
    let problems = match bqp2500() {
        Ok(p) => p,
        Err(v) => return v,
    };
    let refs = ReferenceTable::builtin();
    let solver = SolverConfig {
        epoch_cap: 20,
        ..SolverConfig::default()
    };
    let cfg = BenchConfig::matched(solver, 10);
    let mut hits = BTreeMap::new();
    for k in [0usize, 3, 4] {
        let (report, _) = run_benchmark(
            &problems[k..=k],
            &[Algorithm::Solver(Variant::Full)],
            &cfg,
            &refs,
        )
        .unwrap();
        let ok = report
            .runs
            .iter()
            .filter(|r| r.success == Some(true))
            .count();
        hits.insert(problems[k].name().to_string(), ok);
    }
    let q1 = hits[problems[0].name()];
    Verdict::check(
        q1 >= 8,
        format!("Q1 reached -1515944 in {q1}/10 runs within 20 epochs (need >= 8); secondary Q4/Q5: {hits:?}"),
    )
}

/// Epochs until the known optimum was reached; runs that never reach it
/// count as one more than the epoch budget.
fn epochs_to_reference(r: &RunRecord, cap: usize) -> f64 {
    match r.success {
        Some(true) => r.epochs_to_best as f64,
        _ => (cap + 1) as f64,
    }
}

fn per_instance<F: Fn(&RunRecord) -> f64>(
    runs: &[RunRecord],
    algorithm: &str,
    f: F,
) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in runs.iter().filter(|r| r.algorithm == algorithm) {
        groups.entry(r.instance.clone()).or_default().push(f(r));
    }
    groups
        .into_iter()
        .map(|(k, mut v)| (k, median(&mut v).unwrap()))
        .collect()
}

fn directional_comparison() -> Verdict {
    let problems = match bqp2500() {
        Ok(p) => p,
        Err(v) => return v,
    };
    let cfg = BenchConfig::matched(SolverConfig::default(), repetitions());
    let cap = cfg.solver.epoch_cap;
    let algorithms = [
        Algorithm::Solver(Variant::Full),
        Algorithm::RandomSubqubo,
        Algorithm::D2ts,
    ];
    let (report, _) =
        run_benchmark(&problems, &algorithms, &cfg, &ReferenceTable::builtin()).unwrap();
    let medians: Vec<_> = algorithms
        .iter()
        .map(|a| per_instance(&report.runs, a.name(), |r| epochs_to_reference(r, cap)))
        .collect();
    let wins = medians[0]
        .iter()
        .filter(|(k, full)| **full <= medians[1][*k] && **full <= medians[2][*k])
        .count();
    Verdict::check(
        wins >= 7,
        format!(
            "solver median epochs-to-optimum <= both baselines on {wins}/10 instances (need >= 7)"
        ),
    )
}

fn ablation_direction() -> Verdict {
    let problems = match bqp2500() {
        Ok(p) => p,
        Err(v) => return v,
    };
    let cfg = BenchConfig::matched(SolverConfig::default(), repetitions());
    let algorithms: Vec<_> = Variant::ALL.iter().map(|&v| Algorithm::Solver(v)).collect();
    let (report, _) =
        run_benchmark(&problems, &algorithms, &cfg, &ReferenceTable::builtin()).unwrap();
    let best: Vec<_> = Variant::ALL
        .iter()
        .map(|v| per_instance(&report.runs, v.as_str(), |r| r.best as f64))
        .collect();
    let no_sm = best[0].iter().filter(|(k, f)| **f <= best[1][*k]).count();
    let no_im = best[0].iter().filter(|(k, f)| **f <= best[2][*k]).count();
    Verdict::check(
        no_sm >= 8 && no_im >= 8,
        format!("full median best <= no_sm on {no_sm}/10 and <= no_im on {no_im}/10 instances (need >= 8 each)"),
    )
}

// ---------------------------------------------------------------------------

fn palubeckis_smoke() -> Verdict {
    let started = Instant::now();
    let n = 5000;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(0.5) {
                triplets.push((i, j, rng.random_range(-100i64..=100)));
            }
        }
    }
    let generated = Qubo::from_triplets(n, triplets).unwrap();
    let meta = GeneratorMeta {
        density: Some("0.5".into()),
        seed: Some("10".into()),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p5000_smoke.txt");
    fs::write(&path, write_palubeckis(&generated, &meta)).unwrap();
    drop(generated);
    let file = load(&path, SourceFormat::PalubeckisSingle).unwrap();
    let problem = &file.problems[0];
    let cfg = BenchConfig::matched(
        SolverConfig {
            epoch_cap: 2,
            ..SolverConfig::default()
        },
        1,
    );
    let out = run_algorithm(problem, Algorithm::Solver(Variant::Full), &cfg, 0).unwrap();
    let series = out.trace.best_series();
    let ok = problem.n() == n
        && out.trace.epochs.len() == 2
        && problem.evaluate(&out.x).unwrap() == out.objective
        && series.windows(2).all(|w| w[1] <= w[0]);
    Verdict::check(
        ok,
        format!(
            "n={} density {:.3}: {} epochs, best {} (total {:.1} s incl. generation and parsing)",
            problem.n(),
            problem.density(),
            out.trace.epochs.len(),
            out.objective,
            started.elapsed().as_secs_f64()
        ),
    )
}

fn small_problems(seed: u64, sizes: &[usize]) -> Vec<Qubo> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| Qubo::from_rows(&random_dense(&mut rng, n, 100)).unwrap())
        .collect()
}

/// Every file under `dir` except wall-clock timings.
fn snapshot_dir(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else if path.file_name().unwrap() != "timings.csv" {
                files.insert(
                    path.strip_prefix(dir).unwrap().to_path_buf(),
                    fs::read(&path).unwrap(),
                );
            }
        }
    }
    files
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_hqubo"))
        .args(args)
        .output()
        .unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Verdict {
    let problems: Vec<Qubo> = small_problems(11, &[120, 90])
        .into_iter()
        .enumerate()
        .map(|(k, p)| p.with_name(format!("det.{}", k + 1)))
        .collect();
    let base = SolverConfig {
        epoch_cap: 6,
        patience: 100,
        seed: 21,
        backend: BackendSpec {
            machine_size: 20,
            ..BackendSpec::default()
        },
        ..SolverConfig::default()
    };
    let mut failures = Vec::new();

    // Library: repeated runs and sequential versus parallel dispatch.
    for variant in Variant::ALL {
        let cfg = SolverConfig {
            variant,
            ..base.clone()
        };
        let a = serde_json::to_vec(&solve(&problems[0], &cfg).unwrap().trace).unwrap();
        let b = serde_json::to_vec(&solve(&problems[0], &cfg).unwrap().trace).unwrap();
        let seq = SolverConfig {
            parallel: false,
            ..cfg.clone()
        };
        let c = serde_json::to_vec(&solve(&problems[0], &seq).unwrap().trace).unwrap();
        if a != b || a != c {
            failures.push(format!("solve {variant}"));
        }
    }

    // Harness: one worker versus several, all algorithms, every output file.
    let refs = ReferenceTable::builtin();
    let dirs: Vec<_> = [1usize, 4]
        .iter()
        .map(|&workers| {
            let cfg = BenchConfig {
                workers,
                ..BenchConfig::matched(base.clone(), 2)
            };
            let (report, results) = run_benchmark(&problems, &Algorithm::ALL, &cfg, &refs).unwrap();
            let dir = tempfile::tempdir().unwrap();
            write_report(dir.path(), &report, &results).unwrap();
            let files = snapshot_dir(dir.path());
            (dir, files)
        })
        .collect();
    if dirs[0].1 != dirs[1].1 || dirs[0].1.is_empty() {
        failures.push("bench report files (1 vs 4 workers)".into());
    }

    // CLI: every command twice into the same directory.
    let tmp = tempfile::tempdir().unwrap();
    let instance = tmp.path().join("det.txt");
    fs::write(&instance, write_orlib(&small_problems(12, &[80, 60]))).unwrap();
    let inst = instance.to_str().unwrap();
    let common = [
        "--epoch-cap",
        "4",
        "--patience",
        "50",
        "--machine-size",
        "16",
        "--seed",
        "5",
        "--porcelain",
    ];
    let commands: [(&str, Vec<&str>); 4] = [
        ("solve", vec!["--problem", "2"]),
        (
            "bench",
            vec![
                "--repetitions",
                "2",
                "--algorithms",
                "full,no_sm,no_im,random_subqubo,d2ts",
                "--workers",
                "3",
            ],
        ),
        ("sweep", vec!["--param", "z", "--values", "2,4"]),
        ("ablate", vec!["--repetitions", "2"]),
    ];
    for (name, extra) in commands {
        let out = tmp.path().join(name);
        let out_s = out.to_str().unwrap();
        let mut args = vec![name, "--instance", inst, "--out", out_s];
        args.extend(common);
        args.extend(extra);
        let (code1, stdout1) = cli(&args);
        let files1 = snapshot_dir(&out);
        let (code2, stdout2) = cli(&args);
        let files2 = snapshot_dir(&out);
        if code1 != 0 || code2 != 0 || stdout1 != stdout2 || files1 != files2 || files1.is_empty() {
            failures.push(format!("cli {name} (exit {code1}/{code2})"));
        }
    }

    Verdict::check(
        failures.is_empty(),
        if failures.is_empty() {
            "library, harness (1 vs 4 workers) and all CLI commands byte-identical on rerun"
                .to_string()
        } else {
            format!("non-deterministic: {failures:?}")
        },
    )
}

type Criterion = (u32, &'static str, fn() -> Verdict);

const CRITERIA: [Criterion; 11] = [
    (1, "oracle equivalence, n <= 20", oracle_equivalence),
    (2, "incremental delta exactness", delta_exactness),
    (3, "subQUBO bias correctness", subqubo_bias),
    (4, "Ising transform exactness", ising_transform),
    (5, "exact Ising-machine backend", exact_backend),
    (6, "mutation-rate annealer values", annealer_values),
    (7, "bqp2500 Q1 reproduction", q1_reproduction),
    (
        8,
        "directional comparison vs baselines",
        directional_comparison,
    ),
    (9, "ablation direction", ablation_direction),
    (10, "n=5000 Palubeckis-style smoke run", palubeckis_smoke),
    (11, "determinism", determinism),
];

fn main() {
    // Ignore libtest-style flags cargo may forward; honour an explicit selection.
    let only: Option<Vec<u32>> = std::env::var("HQUBO_ACCEPTANCE_ONLY")
        .ok()
        .map(|v| v.split(',').filter_map(|s| s.trim().parse().ok()).collect());
    if std::env::args().any(|a| a == "--list") {
        for (id, name, _) in CRITERIA {
            println!("criterion_{id}: test  # {name}");
        }
        return;
    }

    let mut failed = Vec::new();
    let total = Instant::now();
    for (id, name, run) in CRITERIA {
        if only.as_ref().is_some_and(|o| !o.contains(&id)) {
            continue;
        }
        let started = Instant::now();
        let verdict = run();
        let took = started.elapsed();
        println!(
            "[{}] criterion {id:>2}: {name} -- {} ({})",
            verdict.status,
            verdict.detail,
            fmt_duration(took)
        );
        if !matches!(verdict.status, Status::Pass) {
            failed.push(id);
        }
    }
    println!(
        "acceptance: {} failing criteria {failed:?} ({})",
        failed.len(),
        fmt_duration(total.elapsed())
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

fn fmt_duration(d: Duration) -> String {
    format!("{:.2} s", d.as_secs_f64())
}
