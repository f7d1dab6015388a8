use std::path::Path;

use d4qms_core::qms::Engine;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::manifest::{ChainSummary, RunManifest};
use crate::records::RecordWriter;
use crate::runner::run_chains;

pub const SAMPLES_FILE: &str = "samples.csv";

/// Run every chain and stream its records to `samples.csv`. The manifest is rewritten after
/// each chain and only marked complete at the end, so an interrupted run leaves a readable
/// CSV of the finished chains next to an incomplete manifest.
pub fn cmd_run(cfg: &RunConfig, out: &Path, workers: usize) -> CliResult<RunManifest> {
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut manifest = RunManifest::new("run", cfg.chain.seed, cfg.snapshot());
    manifest.outputs = vec![SAMPLES_FILE.to_string()];
    manifest.save(out)?;
    let samples_path = out.join(SAMPLES_FILE);
    let mut writer = RecordWriter::create(&samples_path)?;
    let result = Engine::new(&cfg.chain).map_err(CliError::from).and_then(|engine| {
        run_chains(&engine, &cfg.chain, cfg.chains, workers, |o| {
            writer.write_batch(&o.records).map_err(CliError::csv(&samples_path))?;
            let samples = o.records.iter().filter(|r| !r.aborted).count();
            manifest.chains.push(ChainSummary::new(o.chain_id, samples, &o.stats));
            manifest.save(out)
        })
    });
    match result {
        Ok(()) => {
            manifest.finish();
            manifest.save(out)?;
            Ok(manifest)
        }
        Err(e) => {
            manifest.error = Some(e.to_string());
            manifest.save(out)?;
            Err(e)
        }
    }
}
