//! Run manifest printed to stderr after every invocation.

use std::time::Duration;

use serde::Serialize;
use serde_json::{Map, Value};
use twisted_coe::weingarten::CacheStats;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub threads: Option<usize>,
    pub seeds: Vec<u64>,
    pub cache: Option<CacheStats>,
    pub version: &'static str,
    pub wall_time_seconds: f64,
    pub exit_code: u8,
    pub notes: Map<String, Value>,
}

impl RunManifest {
    pub fn new(args: Vec<String>, threads: Option<usize>) -> Self {
        let subcommand = args.iter().skip(1).find(|a| !a.starts_with('-')).cloned().unwrap_or_default();
        RunManifest {
            subcommand,
            args,
            threads,
            seeds: Vec::new(),
            cache: None,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_seconds: 0.0,
            exit_code: 0,
            notes: Map::new(),
        }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.notes.insert(key.to_string(), value.into());
    }

    pub fn finish(&mut self, wall: Duration, exit_code: u8) {
        self.wall_time_seconds = wall.as_secs_f64();
        self.exit_code = exit_code;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
    }
}
