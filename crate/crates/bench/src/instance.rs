//! Benchmark instance formats.
//!
//! Both formats list 1-indexed `i j v` triplets of a maximization problem.
//! An off-diagonal triplet is the interaction of the pair and is stored as
//! `Q_ij = Q_ji = v`, so the pair contributes `2v` to the objective when both
//! variables are set. All coefficients are negated on load so the solver
//! always minimizes; `QuboProblem::negated` records this.
//!
//! OR-Library (`bqp*.txt`, several problems per file):
//!
//! ```text
//! <problem count>
//! <n> <nnz>          repeated per problem
//! <i> <j> <v>        nnz lines
//! ```
//!
//! Palubeckis-style generator output (one problem per file):
//!
//! ```text
//! <n> [density] [seed]
//! <i> <j> <v>        until end of file
//! ```

use std::fmt::Write as _;
use std::io::Read;
use std::path::{Path, PathBuf};

use hqubo::Qubo;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceFormat {
    OrlibMulti,
    PalubeckisSingle,
}

impl std::str::FromStr for SourceFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orlib" | "orlib-multi" | "beasley" => Ok(Self::OrlibMulti),
            "palubeckis" | "palubeckis-single" => Ok(Self::PalubeckisSingle),
            other => Err(BenchError::Config(format!(
                "unknown instance format {other:?}"
            ))),
        }
    }
}

/// Header metadata of a Palubeckis-style file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    /// Density as written in the header, if any.
    pub density: Option<String>,
    pub seed: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub path: Option<PathBuf>,
    /// Hex SHA-256 of the file bytes.
    pub sha256: String,
}

#[derive(Debug, Clone)]
pub struct InstanceFile {
    pub format: SourceFormat,
    pub problems: Vec<Qubo>,
    pub provenance: Provenance,
    pub meta: GeneratorMeta,
    pub warnings: Vec<String>,
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-blank line as `(line number, tokens)`.
    fn next_tokens(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if !tokens.is_empty() {
                return Some((i + 1, tokens));
            }
        }
        None
    }
}

fn number<T: std::str::FromStr>(line: usize, token: &str, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| BenchError::parse(line, format!("invalid {what} {token:?}")))
}

fn triplet(line: usize, tokens: &[&str], n: usize) -> Result<(usize, usize, i64)> {
    if tokens.len() != 3 {
        return Err(BenchError::parse(
            line,
            format!("expected \"i j v\", found {} fields", tokens.len()),
        ));
    }
    let i: usize = number(line, tokens[0], "row index")?;
    let j: usize = number(line, tokens[1], "column index")?;
    let v: i64 = number(line, tokens[2], "coefficient")?;
    for index in [i, j] {
        if index == 0 || index > n {
            return Err(BenchError::parse(
                line,
                format!("index {index} outside [1, {n}]"),
            ));
        }
    }
    Ok((i - 1, j - 1, v))
}

fn build(n: usize, triplets: Vec<(usize, usize, i64)>, name: String, line: usize) -> Result<Qubo> {
    let problem = Qubo::from_triplets(n, triplets)
        .map_err(|e| BenchError::parse(line, e.to_string()))?
        .negate()
        .with_name(name);
    Ok(problem)
}

fn provenance(bytes: &[u8], path: Option<&Path>) -> Provenance {
    Provenance {
        path: path.map(Path::to_path_buf),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

fn utf8(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| {
        let line = bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
            + 1;
        BenchError::parse(line, "file is not valid UTF-8")
    })
}

/// Parses an OR-Library `bqp` file. Problems are named `<stem>.<k>`, `k` from 1.
pub fn parse_orlib(bytes: &[u8], stem: &str) -> Result<InstanceFile> {
    let text = utf8(bytes)?;
    let mut lines = Lines::new(text);
    let (line, tokens) = lines
        .next_tokens()
        .ok_or_else(|| BenchError::parse(1, "empty file: missing problem count"))?;
    if tokens.len() != 1 {
        return Err(BenchError::parse(line, "expected a single problem count"));
    }
    let count: usize = number(line, tokens[0], "problem count")?;

    let mut problems = Vec::with_capacity(count);
    for k in 1..=count {
        let (line, tokens) = lines.next_tokens().ok_or_else(|| {
            BenchError::parse(
                lines.last + 1,
                format!("truncated file: missing header of problem {k}"),
            )
        })?;
        if tokens.len() != 2 {
            return Err(BenchError::parse(
                line,
                format!(
                    "expected \"n nnz\" header for problem {k}, found {} fields",
                    tokens.len()
                ),
            ));
        }
        let n: usize = number(line, tokens[0], "variable count")?;
        let nnz: usize = number(line, tokens[1], "nonzero count")?;
        if n == 0 {
            return Err(BenchError::parse(line, "variable count must be positive"));
        }
        let mut triplets = Vec::with_capacity(nnz);
        let mut last_line = line;
        for e in 0..nnz {
            let (line, tokens) = lines.next_tokens().ok_or_else(|| {
                BenchError::parse(
                    lines.last + 1,
                    format!("truncated file: problem {k} declares {nnz} entries, found {e}"),
                )
            })?;
            triplets.push(triplet(line, &tokens, n)?);
            last_line = line;
        }
        problems.push(build(n, triplets, format!("{stem}.{k}"), last_line)?);
    }
    if let Some((line, _)) = lines.next_tokens() {
        return Err(BenchError::parse(
            line,
            "unexpected data after the last problem (entry count mismatch)",
        ));
    }
    Ok(InstanceFile {
        format: SourceFormat::OrlibMulti,
        problems,
        provenance: provenance(bytes, None),
        meta: GeneratorMeta::default(),
        warnings: Vec::new(),
    })
}

/// Parses a single Palubeckis-style instance, named `stem`.
pub fn parse_palubeckis(bytes: &[u8], stem: &str) -> Result<InstanceFile> {
    let text = utf8(bytes)?;
    let mut lines = Lines::new(text);
    let (line, header) = lines
        .next_tokens()
        .ok_or_else(|| BenchError::parse(1, "empty file: missing header"))?;
    if header.len() > 3 {
        return Err(BenchError::parse(
            line,
            "header must be \"n [density] [seed]\"",
        ));
    }
    let n: usize = number(line, header[0], "variable count")?;
    if n == 0 {
        return Err(BenchError::parse(line, "variable count must be positive"));
    }
    if let Some(d) = header.get(1) {
        number::<f64>(line, d, "density")?;
    }
    if let Some(s) = header.get(2) {
        number::<u64>(line, s, "seed")?;
    }
    let meta = GeneratorMeta {
        density: header.get(1).map(|s| s.to_string()),
        seed: header.get(2).map(|s| s.to_string()),
    };

    let mut triplets = Vec::new();
    let mut last_line = line;
    while let Some((line, tokens)) = lines.next_tokens() {
        triplets.push(triplet(line, &tokens, n)?);
        last_line = line;
    }
    let mut warnings = Vec::new();
    if triplets.is_empty() {
        warnings.push(format!("{stem}: no entries; loaded a zero matrix"));
    }
    let problem = build(n, triplets, stem.to_string(), last_line)?;
    Ok(InstanceFile {
        format: SourceFormat::PalubeckisSingle,
        problems: vec![problem],
        provenance: provenance(bytes, None),
        meta,
        warnings,
    })
}

/// Reads and parses an instance file; the file stem names the problems.
pub fn load(path: &Path, format: SourceFormat) -> Result<InstanceFile> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance")
        .to_string();
    let mut file = match format {
        SourceFormat::OrlibMulti => parse_orlib(&bytes, &stem)?,
        SourceFormat::PalubeckisSingle => parse_palubeckis(&bytes, &stem)?,
    };
    file.provenance.path = Some(path.to_path_buf());
    Ok(file)
}

/// Upper-triangular triplet lines in the source (maximization) sign.
fn write_triplets(out: &mut String, problem: &Qubo) {
    let sign = if problem.negated() { -1 } else { 1 };
    for (i, j, v) in problem.upper_triplets() {
        writeln!(out, "{} {} {}", i + 1, j + 1, sign * v).unwrap();
    }
}

/// Canonical OR-Library text for a list of problems.
pub fn write_orlib(problems: &[Qubo]) -> String {
    let mut out = format!("{}\n", problems.len());
    for p in problems {
        writeln!(out, "{} {}", p.n(), p.upper_triplets().count()).unwrap();
        write_triplets(&mut out, p);
    }
    out
}

/// Canonical Palubeckis-style text for one problem.
pub fn write_palubeckis(problem: &Qubo, meta: &GeneratorMeta) -> String {
    let mut out = problem.n().to_string();
    for field in [&meta.density, &meta.seed].into_iter().flatten() {
        out.push(' ');
        out.push_str(field);
    }
    out.push('\n');
    write_triplets(&mut out, problem);
    out
}
