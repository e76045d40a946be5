//! Benchmark instances, baseline solvers and the repetition harness.

pub mod baseline;
pub mod error;
pub mod harness;
pub mod instance;
pub mod reference;

pub use baseline::{d2ts, random_subqubo, BaselineConfig};
pub use error::{BenchError, Result};
pub use harness::{
    run_algorithm, run_benchmark, write_report, Algorithm, BenchConfig, BenchReport, RunRecord,
    Summary,
};
pub use instance::{
    load, parse_orlib, parse_palubeckis, write_orlib, write_palubeckis, InstanceFile, SourceFormat,
};
pub use reference::ReferenceTable;
