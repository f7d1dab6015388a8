//! Run manifests: what produced a set of output files and how the chains fared.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use d4qms_core::qms::ChainStats;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChainSummary {
    pub chain_id: u64,
    pub samples: usize,
    pub steps: u64,
    pub accepts: u64,
    pub rejects: u64,
    pub reverts: u64,
    pub revert_iters: u64,
    pub aborts: u64,
    pub restarts: u64,
    pub max_residual: f64,
}

impl ChainSummary {
    pub fn new(chain_id: u64, samples: usize, s: &ChainStats) -> Self {
        Self {
            chain_id,
            samples,
            steps: s.steps,
            accepts: s.accepts,
            rejects: s.rejects,
            reverts: s.reverts,
            revert_iters: s.revert_iters,
            aborts: s.aborts,
            restarts: s.restarts,
            max_residual: s.max_residual,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
    pub started_unix: u64,
    pub finished_unix: Option<u64>,
    /// False until every chain finished and every output was written.
    pub complete: bool,
    pub error: Option<String>,
    pub chains: Vec<ChainSummary>,
    /// File names relative to the manifest's directory.
    pub outputs: Vec<String>,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: BTreeMap<&'static str, String>) -> Self {
        Self {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config: config.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            started_unix: unix_now(),
            finished_unix: None,
            complete: false,
            error: None,
            chains: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn finish(&mut self) {
        self.finished_unix = Some(unix_now());
        self.complete = true;
    }

    pub fn totals(&self) -> ChainSummary {
        let mut t = ChainSummary::default();
        for c in &self.chains {
            t.samples += c.samples;
            t.steps += c.steps;
            t.accepts += c.accepts;
            t.rejects += c.rejects;
            t.reverts += c.reverts;
            t.revert_iters += c.revert_iters;
            t.aborts += c.aborts;
            t.restarts += c.restarts;
            t.max_residual = t.max_residual.max(c.max_residual);
        }
        t
    }

    /// Write to `dir/manifest.json` through a temporary file so a reader never sees half a file.
    pub fn save(&self, dir: &Path) -> CliResult<()> {
        let path = dir.join(MANIFEST_FILE);
        let tmp = dir.join(".manifest.json.tmp");
        let text = serde_json::to_string_pretty(self).map_err(CliError::json(&path))?;
        std::fs::write(&tmp, text + "\n").map_err(CliError::io(&tmp))?;
        std::fs::rename(&tmp, &path).map_err(CliError::io(&path))
    }

    pub fn load(dir: &Path) -> CliResult<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
        serde_json::from_str(&text).map_err(CliError::json(&path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn save_load_and_totals() {
        let dir = tempfile::tempdir().unwrap();
        let mut m = RunManifest::new("run", 9, BTreeMap::from([("beta", "0.1".to_string())]));
        let s = ChainStats {
            steps: 10,
            accepts: 7,
            rejects: 3,
            reverts: 2,
            revert_iters: 9,
            aborts: 1,
            restarts: 1,
            max_residual: 1e-12,
        };
        m.chains.push(ChainSummary::new(0, 4, &s));
        m.chains.push(ChainSummary::new(1, 5, &s));
        m.save(dir.path()).unwrap();
        let back = RunManifest::load(dir.path()).unwrap();
        assert_eq!(back, m);
        assert!(!back.complete);
        let t = back.totals();
        assert_eq!((t.samples, t.steps, t.aborts), (9, 20, 2));
        m.finish();
        assert!(m.complete && m.finished_unix.is_some());
    }
}
