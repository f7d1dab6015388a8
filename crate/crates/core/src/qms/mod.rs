//! Gauge-invariant quantum Metropolis sampling.

mod backend;
mod chain;
mod circuit_backend;
mod config;
mod moves;
mod spectral;

pub use backend::{acceptance_probability, QmsBackend};
pub use chain::{
    chain_stream, estimate_energy, metropolis_step, run_chain, ChainStats, Engine, SampleRecord, StepOutcome,
    RESIDUAL_LIMIT,
};
pub use circuit_backend::CircuitBackend;
pub use config::{default_m_tol, BackendKind, ChainConfig};
pub use moves::{apply_link_unitary, Move, MoveSet, MOVESET_STREAM};
pub use spectral::{SpectralBackend, SpectralTables};
