//! Statevector emulation and gauge-invariant quantum Metropolis sampling for
//! a D4 lattice gauge theory on a small periodic lattice.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is on.
//! File formats, the command line front end and parallel chain scheduling live
//! in the companion `d4qms` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod circuits;
pub mod d4;
pub mod gauge;
pub mod math;
pub mod qms;
pub mod statevector;

mod error;

pub use error::{Error, Result};
