use super::{BackendKind, ChainConfig, CircuitBackend, Move, MoveSet, QmsBackend, SpectralBackend, SpectralTables};
use crate::circuits::EvolutionMode;
use crate::gauge::{ExactSpectrum, GaugeModel, SectorDecomposition};
use crate::statevector::{sample_index, RngStream};
use crate::{Error, Result};

/// Largest gauge residual tolerated by the periodic check.
pub const RESIDUAL_LIMIT: f64 = 1e-6;

/// One emitted chain record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRecord {
    pub chain_id: u64,
    /// Metropolis steps taken by this chain so far, across restarts.
    pub step: u64,
    pub energy_index: usize,
    pub energy_value: f64,
    pub plaquette: Option<i8>,
    /// Outcome of the most recent step.
    pub accepted: bool,
    pub revert_iters: usize,
    /// The chain lost its state here and restarted; not a sample.
    pub aborted: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ChainStats {
    pub steps: u64,
    pub accepts: u64,
    pub rejects: u64,
    /// Rejections whose revert loop recovered the energy window.
    pub reverts: u64,
    pub revert_iters: u64,
    pub aborts: u64,
    pub restarts: u64,
    /// Largest gauge residual seen by the periodic check.
    pub max_residual: f64,
}

impl ChainStats {
    pub fn acceptance_rate(&self) -> f64 {
        self.accepts as f64 / self.steps.max(1) as f64
    }

    /// Aborts per rejection.
    pub fn abort_rate(&self) -> f64 {
        self.aborts as f64 / self.rejects.max(1) as f64
    }

    pub fn merge(&mut self, other: &ChainStats) {
        self.steps += other.steps;
        self.accepts += other.accepts;
        self.rejects += other.rejects;
        self.reverts += other.reverts;
        self.revert_iters += other.revert_iters;
        self.aborts += other.aborts;
        self.restarts += other.restarts;
        self.max_residual = self.max_residual.max(other.max_residual);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Accepted { energy: usize },
    Reverted { energy: usize, iters: usize },
    Aborted { iters: usize },
}

/// One Metropolis step from energy-register value `current`.
///
/// On rejection the step alternates between the ancilla-zero test in the pre-move frame and the
/// acceptance measurement until the energy register lands within `m_tol` of `current`.
pub fn metropolis_step<B: QmsBackend>(
    b: &mut B,
    current: usize,
    beta: f64,
    m_tol: usize,
    max_iters: usize,
    mv: Move,
    rng: &mut RngStream,
) -> Result<StepOutcome> {
    b.apply_move(mv)?;
    b.apply_qpe(false)?;
    b.apply_acceptance(current, beta, false)?;
    if b.measure_accept(rng)? {
        let energy = b.measure_energy(rng)?;
        b.reset_ancillas()?;
        return Ok(StepOutcome::Accepted { energy });
    }
    for iters in 1..=max_iters {
        b.apply_acceptance(current, beta, true)?;
        b.apply_qpe(true)?;
        b.apply_move(mv.adjoint())?;
        if b.measure_ancillas_zero(rng)? {
            b.apply_qpe(false)?;
            if b.measure_energy_window(current, m_tol, rng)? {
                let energy = b.measure_energy(rng)?;
                b.reset_ancillas()?;
                return Ok(StepOutcome::Reverted { energy, iters });
            }
            b.apply_qpe(true)?;
        }
        b.apply_move(mv)?;
        b.apply_qpe(false)?;
        b.apply_acceptance(current, beta, false)?;
        b.measure_accept(rng)?;
    }
    Ok(StepOutcome::Aborted { iters: max_iters })
}

/// Phase estimation on the current system state, then measure and clear the energy register.
pub fn estimate_energy<B: QmsBackend>(b: &mut B, rng: &mut RngStream) -> Result<usize> {
    b.apply_qpe(false)?;
    let j = b.measure_energy(rng)?;
    b.reset_ancillas()?;
    Ok(j)
}

/// RNG stream of a chain after `restart` restarts.
pub fn chain_stream(seed: u64, chain_id: u64, restart: u64) -> RngStream {
    RngStream::new(seed, (chain_id << 20) | restart)
}

struct Runner<'c, F> {
    cfg: &'c ChainConfig,
    chain_id: u64,
    stats: ChainStats,
    emit: F,
    last: (bool, usize),
}

enum Flow {
    Continue(usize),
    Restart,
}

impl<F: FnMut(&SampleRecord)> Runner<'_, F> {
    fn step<B: QmsBackend>(&mut self, b: &mut B, current: usize, rng: &mut RngStream) -> Result<Flow> {
        let mv = Move::from_index(sample_index(&self.cfg.move_probs, rng.uniform()));
        let outcome = metropolis_step(
            b,
            current,
            self.cfg.beta,
            self.cfg.m_tol,
            self.cfg.max_revert_iters,
            mv,
            rng,
        )?;
        self.stats.steps += 1;
        Ok(match outcome {
            StepOutcome::Accepted { energy } => {
                self.stats.accepts += 1;
                self.last = (true, 0);
                Flow::Continue(energy)
            }
            StepOutcome::Reverted { iters, .. } => {
                // a rejection keeps the pre-move energy even when the window is wider than one site
                self.stats.rejects += 1;
                self.stats.reverts += 1;
                self.stats.revert_iters += iters as u64;
                self.last = (false, iters);
                Flow::Continue(current)
            }
            StepOutcome::Aborted { iters } => {
                self.stats.rejects += 1;
                self.stats.aborts += 1;
                self.stats.revert_iters += iters as u64;
                self.last = (false, iters);
                let rec = self.record(b, current, None, true);
                (self.emit)(&rec);
                Flow::Restart
            }
        })
    }

    fn record<B: QmsBackend>(&self, b: &B, energy: usize, plaquette: Option<i8>, aborted: bool) -> SampleRecord {
        SampleRecord {
            chain_id: self.chain_id,
            step: self.stats.steps,
            energy_index: energy,
            energy_value: b.grid().energy(energy),
            plaquette,
            accepted: self.last.0,
            revert_iters: self.last.1,
            aborted,
        }
    }
}

/// Run one chain to `cfg.samples` records, calling `emit` for every record including aborts.
pub fn run_chain<B: QmsBackend>(
    b: &mut B,
    cfg: &ChainConfig,
    chain_id: u64,
    emit: impl FnMut(&SampleRecord),
) -> Result<ChainStats> {
    cfg.validate()?;
    let mut r = Runner {
        cfg,
        chain_id,
        stats: ChainStats::default(),
        emit,
        last: (false, 0),
    };
    let mut recorded = 0;
    let mut restart = 0u64;
    'restart: while recorded < cfg.samples {
        if restart > cfg.max_restarts as u64 {
            return Err(Error::TooManyRestarts {
                chain: chain_id,
                max: cfg.max_restarts,
            });
        }
        r.stats.restarts = restart;
        let mut rng = chain_stream(cfg.seed, chain_id, restart);
        restart += 1;
        b.prepare()?;
        let mut current = estimate_energy(b, &mut rng)?;
        for _ in 0..cfg.therm_steps {
            match r.step(b, current, &mut rng)? {
                Flow::Continue(e) => current = e,
                Flow::Restart => continue 'restart,
            }
        }
        loop {
            let plaquette = match cfg.plaquette {
                Some(id) => {
                    let v = b.measure_plaquette(id, &mut rng)?;
                    Some(v)
                }
                None => None,
            };
            let rec = r.record(b, current, plaquette, false);
            (r.emit)(&rec);
            recorded += 1;
            if cfg.residual_every > 0 && recorded % cfg.residual_every == 0 {
                let residual = b.gauge_residual();
                r.stats.max_residual = r.stats.max_residual.max(residual);
                if residual > RESIDUAL_LIMIT {
                    return Err(Error::GaugeViolation {
                        residual,
                        limit: RESIDUAL_LIMIT,
                    });
                }
            }
            if recorded >= cfg.samples {
                break 'restart;
            }
            if plaquette.is_some() {
                // the plaquette does not commute with H, so re-estimate the energy
                current = estimate_energy(b, &mut rng)?;
            }
            for _ in 0..cfg.retherm_steps {
                match r.step(b, current, &mut rng)? {
                    Flow::Continue(e) => current = e,
                    Flow::Restart => continue 'restart,
                }
            }
        }
    }
    Ok(r.stats)
}

/// Everything a chain needs that does not depend on the chain index.
#[derive(Clone, Debug)]
pub struct Engine {
    model: GaugeModel,
    spectrum: ExactSpectrum,
    moves: MoveSet,
    tables: Option<SpectralTables>,
    sectors: Option<SectorDecomposition>,
    backend: BackendKind,
}

impl Engine {
    /// Build the model, the moveset drawn from `cfg.seed`, and whichever tables the backend uses.
    pub fn new(cfg: &ChainConfig) -> Result<Self> {
        cfg.validate()?;
        let model = GaugeModel::new(cfg.hamiltonian);
        let spectrum = ExactSpectrum::compute(&model)?;
        let moves = MoveSet::random(model.lattice(), cfg.seed, cfg.theta, cfg.wilson_length);
        let (tables, sectors) = match cfg.backend {
            BackendKind::Spectral => (Some(SpectralTables::new(&model, &spectrum, &moves, cfg.grid)), None),
            BackendKind::Circuit(EvolutionMode::Exact) => (None, Some(SectorDecomposition::compute(&model))),
            BackendKind::Circuit(EvolutionMode::Trotter(_)) => (None, None),
        };
        Ok(Self {
            model,
            spectrum,
            moves,
            tables,
            sectors,
            backend: cfg.backend,
        })
    }

    pub fn model(&self) -> &GaugeModel {
        &self.model
    }

    pub fn spectrum(&self) -> &ExactSpectrum {
        &self.spectrum
    }

    pub fn moves(&self) -> &MoveSet {
        &self.moves
    }

    /// Run chain `chain_id`. `cfg` must agree with the one the engine was built from
    /// in everything except the sample count.
    pub fn run(&self, cfg: &ChainConfig, chain_id: u64, emit: impl FnMut(&SampleRecord)) -> Result<ChainStats> {
        if cfg.backend != self.backend {
            return Err(Error::invalid("backend", "engine was built for another backend"));
        }
        match (self.backend, &self.tables) {
            (BackendKind::Spectral, Some(t)) => {
                if t.grid() != &cfg.grid {
                    return Err(Error::invalid("grid", "engine was built for another grid"));
                }
                run_chain(&mut SpectralBackend::new(t), cfg, chain_id, emit)
            }
            (BackendKind::Circuit(mode), _) => {
                let mut b = CircuitBackend::new(&self.model, &self.moves, cfg.grid, mode, self.sectors.as_ref())?;
                run_chain(&mut b, cfg, chain_id, emit)
            }
            _ => unreachable!("spectral tables are built with the engine"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{QpeGrid, TrotterParams};
    use crate::gauge::PlaquetteId;
    use alloc::vec::Vec;

    fn collect(engine: &Engine, cfg: &ChainConfig, chain: u64) -> (Vec<SampleRecord>, ChainStats) {
        let mut out = Vec::new();
        let stats = engine.run(cfg, chain, |r| out.push(*r)).unwrap();
        (out, stats)
    }

    fn small(beta: f64, backend: BackendKind) -> ChainConfig {
        let mut cfg = ChainConfig::new(beta, QpeGrid::with_default_range(3).unwrap());
        cfg.backend = backend;
        cfg.seed = 11;
        cfg.samples = 6;
        cfg.therm_steps = 3;
        cfg
    }

    #[test]
    fn spectral_chain_is_reproducible() {
        let cfg = small(0.5, BackendKind::Spectral);
        let engine = Engine::new(&cfg).unwrap();
        let (a, sa) = collect(&engine, &cfg, 0);
        let (b, sb) = collect(&engine, &cfg, 0);
        assert_eq!(a, b);
        assert_eq!(sa, sb);
        assert_eq!(a.iter().filter(|r| !r.aborted).count(), 6);
        let (c, _) = collect(&engine, &cfg, 1);
        assert_ne!(a, c);
    }

    #[test]
    fn stats_are_consistent() {
        let mut cfg = small(0.5, BackendKind::Spectral);
        cfg.samples = 40;
        let engine = Engine::new(&cfg).unwrap();
        let (recs, s) = collect(&engine, &cfg, 3);
        assert_eq!(s.steps, s.accepts + s.rejects);
        assert_eq!(s.rejects, s.reverts + s.aborts);
        assert_eq!(recs.iter().filter(|r| r.aborted).count() as u64, s.aborts);
        assert!(recs.iter().all(|r| r.energy_index < 8));
    }

    #[test]
    fn gate_level_exact_matches_spectral() {
        let mut spec_cfg = small(0.5, BackendKind::Spectral);
        spec_cfg.plaquette = Some(PlaquetteId::Left);
        spec_cfg.retherm_steps = 2;
        spec_cfg.samples = 3;
        spec_cfg.therm_steps = 2;
        let mut gate_cfg = spec_cfg.clone();
        gate_cfg.backend = BackendKind::Circuit(EvolutionMode::Exact);
        let (a, sa) = collect(&Engine::new(&spec_cfg).unwrap(), &spec_cfg, 0);
        let (b, sb) = collect(&Engine::new(&gate_cfg).unwrap(), &gate_cfg, 0);
        assert_eq!(a, b);
        assert_eq!(sa, sb);
    }

    #[test]
    fn gate_level_trotter_runs_and_stays_gauge_invariant() {
        let mut cfg = small(0.1, BackendKind::Circuit(EvolutionMode::Trotter(TrotterParams::new(2).unwrap())));
        cfg.samples = 2;
        cfg.therm_steps = 1;
        cfg.residual_every = 1;
        let engine = Engine::new(&cfg).unwrap();
        let (recs, _) = collect(&engine, &cfg, 0);
        assert!(recs.iter().filter(|r| !r.aborted).count() == 2);
    }

    #[test]
    fn tiny_revert_budget_aborts_and_restarts() {
        let mut cfg = small(5.0, BackendKind::Spectral);
        cfg.max_revert_iters = 1;
        cfg.samples = 30;
        cfg.max_restarts = 1000;
        let engine = Engine::new(&cfg).unwrap();
        let (recs, s) = collect(&engine, &cfg, 0);
        assert!(s.aborts > 0);
        assert_eq!(s.restarts, s.aborts);
        assert!(recs.iter().any(|r| r.aborted));
    }

    #[test]
    fn restart_limit_is_an_error() {
        let mut cfg = small(5.0, BackendKind::Spectral);
        cfg.max_revert_iters = 1;
        cfg.samples = 1000;
        cfg.max_restarts = 0;
        let engine = Engine::new(&cfg).unwrap();
        let err = engine.run(&cfg, 0, |_| {}).unwrap_err();
        assert!(matches!(err, Error::TooManyRestarts { .. }));
    }
}
