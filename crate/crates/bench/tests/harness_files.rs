use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use hqubo::{BackendSpec, Qubo, SolverConfig};
use hqubo_bench::instance::GeneratorMeta;
use hqubo_bench::{
    load, parse_orlib, run_benchmark, write_orlib, write_palubeckis, write_report, Algorithm,
    BenchConfig, BenchError, ReferenceTable, SourceFormat,
};
use rand::{Rng, SeedableRng};

fn random_problem(seed: u64, n: usize, density: f64) -> Qubo {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in i..n {
            if rng.random_bool(density) {
                triplets.push((i, j, rng.random_range(-100i64..=100)));
            }
        }
    }
    Qubo::from_triplets(n, triplets).unwrap()
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(
                    p.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&p).unwrap(),
                );
            }
        }
    }
    out
}

fn config() -> BenchConfig {
    BenchConfig::matched(
        SolverConfig {
            epoch_cap: 3,
            patience: 10,
            seed: 40,
            backend: BackendSpec {
                machine_size: 10,
                ..BackendSpec::default()
            },
            ..SolverConfig::default()
        },
        2,
    )
}

#[test]
fn generated_orlib_file_round_trips_through_disk() {
    let problems: Vec<Qubo> = (0..3)
        .map(|k| random_problem(k, 40 + 10 * k as usize, 0.1))
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bqpgen.txt");
    fs::write(&path, write_orlib(&problems)).unwrap();
    let file = load(&path, SourceFormat::OrlibMulti).unwrap();
    assert_eq!(file.problems.len(), 3);
    assert_eq!(file.provenance.path.as_deref(), Some(path.as_path()));
    assert_eq!(file.provenance.sha256.len(), 64);
    let mut rng = rand::rngs::StdRng::seed_from_u64(9);
    for (k, (orig, loaded)) in problems.iter().zip(&file.problems).enumerate() {
        assert_eq!(loaded.name(), format!("bqpgen.{}", k + 1));
        assert!(loaded.negated());
        for _ in 0..20 {
            let x: Vec<bool> = (0..orig.n()).map(|_| rng.random_bool(0.5)).collect();
            assert_eq!(loaded.evaluate(&x).unwrap(), -orig.evaluate(&x).unwrap());
        }
    }
}

#[test]
fn palubeckis_file_keeps_header_metadata() {
    let p = random_problem(5, 30, 0.5);
    let meta = GeneratorMeta {
        density: Some("0.5".into()),
        seed: Some("123".into()),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p30.txt");
    fs::write(&path, write_palubeckis(&p, &meta)).unwrap();
    let file = load(&path, SourceFormat::PalubeckisSingle).unwrap();
    assert_eq!(file.meta, meta);
    assert_eq!(file.problems[0].name(), "p30");
}

#[test]
fn parse_errors_are_located() {
    let err = parse_orlib(b"1\n3 2\n1 1 4\n2 9 1\n", "bad").unwrap_err();
    assert!(matches!(err, BenchError::Parse { line: 4, .. }), "{err}");
    let missing = load(
        Path::new("/definitely/not/here.txt"),
        SourceFormat::OrlibMulti,
    )
    .unwrap_err();
    assert!(matches!(missing, BenchError::Io(_)));
}

#[test]
fn zero_repetitions_give_empty_but_valid_report() {
    let problems = vec![random_problem(1, 20, 0.3).with_name("empty.1")];
    let mut cfg = config();
    cfg.repetitions = 0;
    let (report, results) =
        run_benchmark(&problems, &Algorithm::ALL, &cfg, &ReferenceTable::builtin()).unwrap();
    assert!(report.runs.is_empty() && report.summary.is_empty() && results.is_empty());
    let dir = tempfile::tempdir().unwrap();
    write_report(dir.path(), &report, &results).unwrap();
    for name in ["results.csv", "summary.csv", "series.csv"] {
        let mut reader = csv::Reader::from_path(dir.path().join(name)).unwrap();
        assert!(!reader.headers().unwrap().is_empty());
        assert_eq!(reader.records().count(), 0, "{name}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results.json")).unwrap())
            .unwrap();
    assert_eq!(json["runs"].as_array().unwrap().len(), 0);
}

#[test]
fn rerun_is_byte_identical_apart_from_timings() {
    let problems = vec![
        random_problem(2, 50, 0.2).with_name("rerun.1"),
        random_problem(3, 35, 0.4).with_name("rerun.2"),
    ];
    let refs = ReferenceTable::builtin();
    let run = |workers| {
        let cfg = BenchConfig {
            workers,
            ..config()
        };
        let (report, results) = run_benchmark(&problems, &Algorithm::ALL, &cfg, &refs).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_report(dir.path(), &report, &results).unwrap();
        let mut f = files(dir.path());
        assert!(f.remove("timings.csv").is_some());
        (report, f)
    };
    let (a, fa) = run(1);
    let (b, fb) = run(3);
    assert_eq!(a, b);
    assert_eq!(fa, fb);
    assert_eq!(a.runs.len(), 2 * 5 * 2);
    // Paired seeds: repetition k uses base_seed + k for every algorithm.
    assert!(a.runs.iter().all(|r| r.seed == 40 + r.repetition as u64));
    assert_eq!(fa.keys().filter(|k| k.starts_with("traces")).count(), 20);
}

#[test]
fn known_references_mark_success() {
    let p = random_problem(4, 12, 1.0).with_name("tiny.1");
    let refs =
        ReferenceTable::from_csv("instance,optimum,source\ntiny.1,-1000000,made up\n".as_bytes())
            .unwrap();
    let (report, _) = run_benchmark(&[p], &[Algorithm::D2ts], &config(), &refs).unwrap();
    assert!(report.runs.iter().all(|r| r.success == Some(false)));
    assert_eq!(report.summary[0].success_rate, "0/2");
    assert!(ReferenceTable::builtin().get("bqp2500.1").is_some());
}
