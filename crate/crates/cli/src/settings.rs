//! Flags, the `key=value` config file, and their resolution into solver
//! settings. A flag always wins over the file; the file wins over defaults.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use hqubo::{BackendKind, ControlWeights, MutationSchedule, SolverConfig, TabuFeed, Variant};
use hqubo_bench::SourceFormat;

use crate::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HQUBO_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "hqubo-out";

/// Keys accepted in a config file. Each matches the long flag of the same name.
pub const FILE_KEYS: &[&str] = &[
    "instance",
    "format",
    "problem",
    "z",
    "alpha",
    "tenure",
    "w1",
    "w2",
    "w3",
    "machine-size",
    "backend",
    "sweeps",
    "patience",
    "epoch-cap",
    "seed",
    "annealer",
    "variant",
    "feed",
    "parallel",
    "repetitions",
    "workers",
];

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Instance file; repeat for several files
    #[arg(long = "instance", short = 'i', value_name = "PATH")]
    pub instances: Vec<PathBuf>,
    /// Instance format: orlib or palubeckis
    #[arg(long)]
    pub format: Option<String>,
    /// 1-based problem index within each instance file (default: all; solve: 1)
    #[arg(long)]
    pub problem: Option<usize>,
    /// Output directory [env: HQUBO_OUT_DIR, default: hqubo-out]
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Config file of key=value lines; flags override it
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Extra reference optima (csv: instance,optimum[,source])
    #[arg(long, value_name = "PATH")]
    pub references: Option<PathBuf>,
    /// Worker threads (0 = all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Only key=value lines on stdout, nothing on stderr but errors
    #[arg(long)]
    pub porcelain: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    /// Solution-set size
    #[arg(long)]
    pub z: Option<usize>,
    /// Tabu iterations per epoch (default 5n)
    #[arg(long)]
    pub alpha: Option<usize>,
    /// Tabu tenure (default max(1, n/150))
    #[arg(long, short = 'c')]
    pub tenure: Option<usize>,
    #[arg(long)]
    pub w1: Option<f64>,
    #[arg(long)]
    pub w2: Option<f64>,
    #[arg(long)]
    pub w3: Option<f64>,
    /// Ising machine size m
    #[arg(long, short = 'm')]
    pub machine_size: Option<usize>,
    /// Ising machine backend: annealing or exact
    #[arg(long)]
    pub backend: Option<String>,
    /// Annealing sweeps per subproblem
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// Epochs without improvement before stopping
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub epoch_cap: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Mutation-rate schedule: cosine, constant[:RATE] or step[:START:DEC:EVERY]
    #[arg(long)]
    pub annealer: Option<String>,
    /// full, no_sm or no_im
    #[arg(long)]
    pub variant: Option<String>,
    /// Tabu result handed back: best or final
    #[arg(long)]
    pub feed: Option<String>,
    /// Run per-solution work sequentially (results are identical)
    #[arg(long)]
    pub sequential: bool,
}

/// Parsed config file. Repeated keys accumulate; single-valued keys use the
/// last occurrence.
#[derive(Debug, Clone, Default)]
pub struct FileConfig {
    values: BTreeMap<String, Vec<String>>,
}

impl FileConfig {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, CliError> {
        let mut values: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Parse(format!(
                    "{}:{}: expected key=value",
                    origin.display(),
                    k + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            if !FILE_KEYS.contains(&key.as_str()) {
                return Err(CliError::Usage(format!(
                    "{}:{}: unknown key {key:?}",
                    origin.display(),
                    k + 1
                )));
            }
            values
                .entry(key)
                .or_default()
                .push(value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path)
    }

    fn last(&self, key: &str) -> Option<&str> {
        self.values
            .get(key)
            .and_then(|v| v.last())
            .map(String::as_str)
    }

    fn all(&self, key: &str) -> &[String] {
        self.values.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The flag if given, otherwise the parsed file value. `auto` in the file
    /// means "not set".
    fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.last(key) {
            None | Some("auto") => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }
}

fn usage<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::Usage(format!("{what}: {e}"))
}

pub fn parse_format(s: &str) -> Result<SourceFormat, CliError> {
    s.parse().map_err(usage("--format"))
}

pub fn format_name(format: SourceFormat) -> &'static str {
    match format {
        SourceFormat::OrlibMulti => "orlib",
        SourceFormat::PalubeckisSingle => "palubeckis",
    }
}

/// `cosine`, `constant[:rate]` or `step[:start:decrement:every]`.
pub fn parse_schedule(s: &str) -> Result<MutationSchedule, CliError> {
    let bad = || CliError::Usage(format!("invalid annealer {s:?}"));
    let mut parts = s.split(':');
    let kind = parts.next().unwrap_or_default();
    let nums: Vec<&str> = parts.collect();
    let f = |t: &str| {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v >= 0.0)
            .ok_or_else(bad)
    };
    match (kind, nums.as_slice()) {
        ("cosine", []) => Ok(MutationSchedule::Cosine),
        ("constant", []) => Ok(MutationSchedule::CONSTANT_DEFAULT),
        ("constant", [rate]) => Ok(MutationSchedule::Constant { rate: f(rate)? }),
        ("step", []) => Ok(MutationSchedule::STEP_DEFAULT),
        ("step", [start, dec, every]) => Ok(MutationSchedule::Step {
            start: f(start)?,
            decrement: f(dec)?,
            every: every
                .parse()
                .ok()
                .filter(|&e: &u32| e > 0)
                .ok_or_else(bad)?,
        }),
        _ => Err(bad()),
    }
}

pub fn schedule_name(s: &MutationSchedule) -> String {
    match *s {
        MutationSchedule::Cosine => "cosine".into(),
        MutationSchedule::Constant { rate } => format!("constant:{rate}"),
        MutationSchedule::Step {
            start,
            decrement,
            every,
        } => format!("step:{start}:{decrement}:{every}"),
    }
}

fn parse_feed(s: &str) -> Result<TabuFeed, CliError> {
    match s {
        "best" => Ok(TabuFeed::Best),
        "final" => Ok(TabuFeed::Final),
        other => Err(CliError::Usage(format!("invalid feed {other:?}"))),
    }
}

fn feed_name(f: TabuFeed) -> &'static str {
    match f {
        TabuFeed::Best => "best",
        TabuFeed::Final => "final",
    }
}

/// Everything a command needs, after merging flags, file and environment.
#[derive(Debug, Clone)]
pub struct Settings {
    pub instances: Vec<PathBuf>,
    pub format: SourceFormat,
    pub problem: Option<usize>,
    pub solver: SolverConfig,
    pub repetitions: Option<usize>,
    pub workers: usize,
    pub out: PathBuf,
    pub references: Option<PathBuf>,
    pub porcelain: bool,
}

impl Settings {
    pub fn resolve(common: &CommonArgs, repetitions: Option<usize>) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::merge(
            common,
            repetitions,
            &file,
            std::env::var_os(OUT_DIR_ENV).map(PathBuf::from),
        )
    }

    pub fn merge(
        common: &CommonArgs,
        repetitions: Option<usize>,
        file: &FileConfig,
        env_out: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let a = &common.solver;
        let instances = if common.instances.is_empty() {
            file.all("instance").iter().map(PathBuf::from).collect()
        } else {
            common.instances.clone()
        };
        let format = match file.pick(common.format.clone(), "format")? {
            Some(f) => parse_format(&f)?,
            None => SourceFormat::OrlibMulti,
        };
        let problem = file.pick(common.problem, "problem")?;
        if problem == Some(0) {
            return Err(CliError::Usage("--problem is 1-based".into()));
        }

        let mut solver = SolverConfig::default();
        if let Some(z) = file.pick(a.z, "z")? {
            solver.z = z;
        }
        solver.alpha = file.pick(a.alpha, "alpha")?;
        solver.tenure = file.pick(a.tenure, "tenure")?;
        let d = ControlWeights::<f64>::default();
        solver.weights = ControlWeights {
            w1: file.pick(a.w1, "w1")?.unwrap_or(d.w1),
            w2: file.pick(a.w2, "w2")?.unwrap_or(d.w2),
            w3: file.pick(a.w3, "w3")?.unwrap_or(d.w3),
        };
        if let Some(m) = file.pick(a.machine_size, "machine-size")? {
            solver.backend.machine_size = m;
        }
        if let Some(b) = file.pick(a.backend.clone(), "backend")? {
            solver.backend.kind = b.parse::<BackendKind>().map_err(usage("--backend"))?;
        }
        if let Some(s) = file.pick(a.sweeps, "sweeps")? {
            solver.backend.sweeps = s;
        }
        if let Some(p) = file.pick(a.patience, "patience")? {
            solver.patience = p;
        }
        if let Some(e) = file.pick(a.epoch_cap, "epoch-cap")? {
            solver.epoch_cap = e;
        }
        if let Some(s) = file.pick(a.seed, "seed")? {
            solver.seed = s;
        }
        if let Some(s) = file.pick(a.annealer.clone(), "annealer")? {
            solver.schedule = parse_schedule(&s)?;
        }
        if let Some(v) = file.pick(a.variant.clone(), "variant")? {
            solver.variant = v.parse::<Variant>().map_err(usage("--variant"))?;
        }
        if let Some(f) = file.pick(a.feed.clone(), "feed")? {
            solver.feed = parse_feed(&f)?;
        }
        solver.parallel = !a.sequential && file.pick(None, "parallel")?.unwrap_or(true);
        solver.validate().map_err(usage("invalid configuration"))?;

        let repetitions = file.pick(repetitions, "repetitions")?;
        let workers = file.pick(common.workers, "workers")?.unwrap_or(0);
        let out = common
            .out
            .clone()
            .or(env_out)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
        Ok(Self {
            instances,
            format,
            problem,
            solver,
            repetitions,
            workers,
            out,
            references: common.references.clone(),
            porcelain: common.porcelain,
        })
    }

    /// A config file that reproduces this run when passed back via `--config`.
    pub fn snapshot(&self) -> String {
        let s = &self.solver;
        let mut out = String::new();
        for path in &self.instances {
            writeln!(out, "instance={}", path.display()).unwrap();
        }
        writeln!(out, "format={}", format_name(self.format)).unwrap();
        if let Some(p) = self.problem {
            writeln!(out, "problem={p}").unwrap();
        }
        let opt = |v: Option<usize>| v.map_or_else(|| "auto".to_string(), |v| v.to_string());
        writeln!(out, "z={}", s.z).unwrap();
        writeln!(out, "alpha={}", opt(s.alpha)).unwrap();
        writeln!(out, "tenure={}", opt(s.tenure)).unwrap();
        writeln!(out, "w1={}", s.weights.w1).unwrap();
        writeln!(out, "w2={}", s.weights.w2).unwrap();
        writeln!(out, "w3={}", s.weights.w3).unwrap();
        writeln!(out, "machine-size={}", s.backend.machine_size).unwrap();
        writeln!(out, "backend={}", s.backend.kind).unwrap();
        writeln!(out, "sweeps={}", s.backend.sweeps).unwrap();
        writeln!(out, "patience={}", s.patience).unwrap();
        writeln!(out, "epoch-cap={}", s.epoch_cap).unwrap();
        writeln!(out, "seed={}", s.seed).unwrap();
        writeln!(out, "annealer={}", schedule_name(&s.schedule)).unwrap();
        writeln!(out, "variant={}", s.variant).unwrap();
        writeln!(out, "feed={}", feed_name(s.feed)).unwrap();
        writeln!(out, "parallel={}", s.parallel).unwrap();
        if let Some(r) = self.repetitions {
            writeln!(out, "repetitions={r}").unwrap();
        }
        writeln!(out, "workers={}", self.workers).unwrap();
        out
    }
}
