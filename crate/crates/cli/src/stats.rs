//! The JSON stats record every command emits.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sparsekit::sparsify::Provenance;
use sparsekit::CostLedger;

/// Bumped on any change to the field set below.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Stats {
    pub schema_version: u32,
    pub command: String,
    pub seed: Option<u64>,
    pub epsilon: Option<f64>,
    pub ledger: CostLedger,
    pub provenance: Option<Provenance>,
    /// Milliseconds per phase, plus `total`.
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
    pub result: Value,
}

impl Stats {
    pub fn new(command: &str) -> Self {
        Stats {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            seed: None,
            epsilon: None,
            ledger: CostLedger::default(),
            provenance: None,
            timings: BTreeMap::new(),
            warnings: Vec::new(),
            result: Value::Null,
        }
    }
}

/// Wall-clock phases of one run.
pub struct Timer {
    start: Instant,
    phases: BTreeMap<String, f64>,
}

impl Timer {
    pub fn start() -> Self {
        Timer { start: Instant::now(), phases: BTreeMap::new() }
    }

    pub fn phase<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.phases.entry(name.to_string()).or_insert(0.0) += t.elapsed().as_secs_f64() * 1e3;
        out
    }

    pub fn finish(mut self) -> BTreeMap<String, f64> {
        self.phases.insert("total".into(), self.start.elapsed().as_secs_f64() * 1e3);
        self.phases
    }
}
