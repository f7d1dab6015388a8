//! Dense statevector emulation over named qubit registers.

mod layout;
mod rng;
mod state;

pub use layout::{Register, RegisterLayout};
pub use rng::RngStream;
pub use state::{binary_outcome, extract, sample_index, StateVector, MAX_DENSE_ARITY};
