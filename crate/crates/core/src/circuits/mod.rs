//! Gate-level constructions: link-register primitives, plaquette basis change,
//! Trotterized evolution and phase estimation.

mod evolution;
mod gate;
mod qpe;

pub use evolution::{
    apply_to_links, kinetic_step, operator_norm_distance, plaquette_basis_change, potential_step,
    standard_links, trotter_error, trotter_evolution, TrotterParams,
};
pub use gate::{Circuit, Gate, LinkQubits, SYSTEM_QUBITS};
pub use qpe::{inverse_qft, qft, qpe_circuit, qpe_coefficient, qpe_distribution, EvolutionMode, QpeGrid};
