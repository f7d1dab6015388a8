//! Binary statevector snapshots: a 16-byte header (8-byte magic, little-endian `u64` qubit
//! count) followed by little-endian `f64` pairs `(re, im)` per amplitude.

use std::io::{self, Read, Write};

use d4qms_core::math::C64;
use d4qms_core::statevector::{RegisterLayout, StateVector};

pub const MAGIC: [u8; 8] = *b"D4QMSSV\x01";

pub fn write_state(mut w: impl Write, state: &StateVector) -> io::Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&(state.num_qubits() as u64).to_le_bytes())?;
    for a in state.amplitudes() {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    w.flush()
}

fn invalid(msg: String) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg)
}

/// Read a snapshot into `layout`, which must have the stored qubit count.
pub fn read_state(mut r: impl Read, layout: RegisterLayout) -> io::Result<StateVector> {
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if header[..8] != MAGIC {
        return Err(invalid("not a statevector snapshot".into()));
    }
    let qubits = u64::from_le_bytes(header[8..].try_into().expect("8 bytes"));
    if qubits != layout.num_qubits() as u64 {
        return Err(invalid(format!(
            "snapshot has {qubits} qubits, layout has {}",
            layout.num_qubits()
        )));
    }
    let n = 1usize << qubits;
    let mut bytes = vec![0u8; 16 * n];
    r.read_exact(&mut bytes)?;
    let amps = bytes
        .chunks_exact(16)
        .map(|c| {
            C64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    StateVector::from_amplitudes(layout, amps).map_err(|e| invalid(e.to_string()))
}
