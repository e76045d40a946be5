//! Reference optima used to score success rates.
//!
//! These are comparison data, not solver inputs. The built-in table covers the
//! OR-Library `bqp2500` set; other values (e.g. best-known Palubeckis results)
//! are supplied by the user in the same CSV layout.

use std::collections::BTreeMap;
use std::io::Read;

use serde::Deserialize;

use crate::error::Result;

const BUILTIN: &str = include_str!("../data/reference_optima.csv");

#[derive(Debug, Deserialize)]
struct Row {
    instance: String,
    optimum: i64,
    #[allow(dead_code)]
    source: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReferenceTable {
    optima: BTreeMap<String, i64>,
}

impl ReferenceTable {
    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN.as_bytes()).expect("built-in reference table is valid")
    }

    /// Reads `instance,optimum,source` rows (minimization sign).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut optima = BTreeMap::new();
        for row in csv::Reader::from_reader(reader).deserialize() {
            let row: Row = row?;
            optima.insert(row.instance, row.optimum);
        }
        Ok(Self { optima })
    }

    pub fn get(&self, instance: &str) -> Option<i64> {
        self.optima.get(instance).copied()
    }

    /// Adds `other`'s entries, overriding on conflict.
    pub fn extend(&mut self, other: ReferenceTable) {
        self.optima.extend(other.optima);
    }

    pub fn len(&self) -> usize {
        self.optima.len()
    }

    pub fn is_empty(&self) -> bool {
        self.optima.is_empty()
    }
}
