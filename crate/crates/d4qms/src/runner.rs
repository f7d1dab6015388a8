//! Runs independent chains on a worker pool and hands their records back in chain order.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;

use d4qms_core::qms::{ChainConfig, ChainStats, Engine, SampleRecord};

use crate::error::{CliError, CliResult};

/// Records and statistics of one finished chain.
#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub chain_id: u64,
    pub records: Vec<SampleRecord>,
    pub stats: ChainStats,
}

/// Run chains `0..chains` on `workers` threads. `sink` sees each chain exactly once, in
/// increasing chain order, so its output does not depend on the worker count. The first
/// failing chain (in chain order) stops the sink and its error is returned.
pub fn run_chains(
    engine: &Engine,
    cfg: &ChainConfig,
    chains: usize,
    workers: usize,
    mut sink: impl FnMut(&ChainOutput) -> CliResult<()>,
) -> CliResult<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(u64, d4qms_core::Result<ChainOutput>)>();
    pool.in_place_scope(|s| {
        for id in 0..chains as u64 {
            let tx = tx.clone();
            let stop = &stop;
            s.spawn(move |_| {
                if stop.load(Ordering::Relaxed) {
                    return;
                }
                let mut records = Vec::new();
                let out = engine.run(cfg, id, |r| records.push(*r)).map(|stats| ChainOutput {
                    chain_id: id,
                    records,
                    stats,
                });
                let _ = tx.send((id, out));
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut next = 0u64;
        let mut result = Ok(());
        for (id, out) in rx {
            pending.insert(id, out);
            while let Some(out) = pending.remove(&next) {
                next += 1;
                if result.is_err() {
                    continue;
                }
                result = out.map_err(CliError::from).and_then(|o| sink(&o));
                if result.is_err() {
                    stop.store(true, Ordering::Relaxed);
                }
            }
        }
        result
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use d4qms_core::circuits::QpeGrid;

    fn cfg() -> ChainConfig {
        let mut c = ChainConfig::new(0.1, QpeGrid::with_default_range(3).unwrap());
        c.samples = 5;
        c.therm_steps = 3;
        c.seed = 17;
        c
    }

    #[test]
    fn order_and_content_do_not_depend_on_workers() {
        let c = cfg();
        let engine = Engine::new(&c).unwrap();
        let collect = |workers| {
            let mut seen = Vec::new();
            run_chains(&engine, &c, 6, workers, |o| {
                seen.push((o.chain_id, o.records.clone(), o.stats));
                Ok(())
            })
            .unwrap();
            seen
        };
        let one = collect(1);
        assert_eq!(one.iter().map(|s| s.0).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(one, collect(3));
    }

    #[test]
    fn restart_budget_error_is_returned() {
        let mut c = cfg();
        c.beta = 5.0;
        c.max_revert_iters = 1;
        c.max_restarts = 0;
        c.samples = 200;
        let engine = Engine::new(&c).unwrap();
        let err = run_chains(&engine, &c, 2, 2, |_| Ok(())).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }
}
