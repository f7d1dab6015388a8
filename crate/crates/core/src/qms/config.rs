use crate::circuits::{EvolutionMode, QpeGrid, TrotterParams};
use crate::gauge::{HamiltonianSpec, PlaquetteId};
use crate::{Error, Result};

/// Which emulation path a chain runs on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendKind {
    /// Gate-level statevector over links, energy, acceptance and auxiliary registers.
    Circuit(EvolutionMode),
    /// Same operations expressed in the physical eigenbasis; phase estimation is exact.
    Spectral,
}

/// Everything that defines a single Markov chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainConfig {
    pub beta: f64,
    pub hamiltonian: HamiltonianSpec,
    pub grid: QpeGrid,
    pub trotter: TrotterParams,
    pub therm_steps: usize,
    pub retherm_steps: usize,
    pub m_tol: usize,
    pub max_revert_iters: usize,
    pub move_probs: [f64; 4],
    pub theta: [f64; 2],
    /// Longest word in the based cycles entering the Wilson-loop generator.
    pub wilson_length: usize,
    pub seed: u64,
    pub samples: usize,
    pub plaquette: Option<PlaquetteId>,
    pub max_restarts: usize,
    pub backend: BackendKind,
    /// Check the gauge residual at every `k`-th measurement; 0 disables the check.
    pub residual_every: usize,
}

impl ChainConfig {
    pub const DEFAULT_THERM: usize = 50;
    pub const DEFAULT_MAX_REVERT: usize = 100;
    pub const DEFAULT_MAX_RESTARTS: usize = 10_000;
    /// Words of length 3 separate the physical space; the fundamental cycles alone (length 1)
    /// commute with the reflection inverting both y links.
    pub const DEFAULT_WILSON_LENGTH: usize = 3;
    pub const MAX_WILSON_LENGTH: usize = 4;

    /// Defaults for an energy-only run.
    pub fn new(beta: f64, grid: QpeGrid) -> Self {
        Self {
            beta,
            hamiltonian: HamiltonianSpec::default(),
            grid,
            trotter: TrotterParams::default(),
            therm_steps: Self::DEFAULT_THERM,
            retherm_steps: 1,
            m_tol: default_m_tol(beta, grid.qubits()),
            max_revert_iters: Self::DEFAULT_MAX_REVERT,
            move_probs: [0.25; 4],
            theta: [1.0, 1.0],
            wilson_length: Self::DEFAULT_WILSON_LENGTH,
            seed: 0,
            samples: 0,
            plaquette: None,
            max_restarts: Self::DEFAULT_MAX_RESTARTS,
            backend: BackendKind::Spectral,
            residual_every: 0,
        }
    }

    /// Defaults for a run that also measures a plaquette (20 rethermalization steps).
    pub fn with_plaquette(mut self, id: PlaquetteId) -> Self {
        self.plaquette = Some(id);
        self.retherm_steps = 20;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::invalid("beta", "must be finite and non-negative"));
        }
        let total: f64 = self.move_probs.iter().sum();
        if self.move_probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("move_probs", "must be non-negative and sum to 1"));
        }
        if self.max_revert_iters == 0 {
            return Err(Error::invalid("max_revert_iters", "must be at least 1"));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if !(1..=Self::MAX_WILSON_LENGTH).contains(&self.wilson_length) {
            return Err(Error::invalid("wilson_length", "must be between 1 and 4"));
        }
        if self.m_tol >= self.grid.size() {
            return Err(Error::invalid("m_tol", "window wider than the grid"));
        }
        Ok(())
    }
}

/// Default tolerance in grid units: 3 at `beta >= 0.5` with at least 5 energy qubits, else 0.
pub fn default_m_tol(beta: f64, qe: usize) -> usize {
    if beta >= 0.5 && qe >= 5 {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let g = QpeGrid::with_default_range(5).unwrap();
        let c = ChainConfig::new(0.5, g);
        assert_eq!(c.m_tol, 3);
        assert_eq!(c.therm_steps, 50);
        assert_eq!(c.retherm_steps, 1);
        assert_eq!(ChainConfig::new(0.0, g).m_tol, 0);
        assert_eq!(ChainConfig::new(0.5, QpeGrid::with_default_range(4).unwrap()).m_tol, 0);
        let p = c.clone().with_plaquette(PlaquetteId::Left);
        assert_eq!(p.retherm_steps, 20);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn validation() {
        let g = QpeGrid::with_default_range(3).unwrap();
        let mut c = ChainConfig::new(0.1, g);
        c.move_probs = [0.5, 0.5, 0.5, 0.0];
        assert!(c.validate().is_err());
        let mut c = ChainConfig::new(-1.0, g);
        assert!(c.validate().is_err());
        c.beta = 0.1;
        c.m_tol = 8;
        assert!(c.validate().is_err());
    }
}
