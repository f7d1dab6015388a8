use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::d4::{FourierMatrix, GroupElement, IrrepSlot};
use crate::gauge::SectorDecomposition;
use crate::math::{cis, sqrt, CMatrix, C64, ONE, ZERO};
use crate::statevector::StateVector;
use crate::{Error, Result};

/// Qubits of one link register, least significant first.
pub type LinkQubits = [usize; 3];

/// Number of qubits occupied by the link registers, which must sit at the bottom of the layout
/// for [`Gate::Evolution`].
pub const SYSTEM_QUBITS: usize = 12;

/// A primitive operation of the emulator.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    Hadamard { qubit: usize },
    Swap { a: usize, b: usize },
    /// `diag(1, e^{i angle})`.
    Phase { qubit: usize, angle: f64 },
    ControlledPhase { control: usize, target: usize, angle: f64 },
    /// `|g> -> |g^-1>`.
    Inverse { link: LinkQubits },
    /// `|g>|h> -> |g>|g h>`, or `|g>|g^-1 h>` when `inverse` is set.
    Mult { src: LinkQubits, dst: LinkQubits, inverse: bool },
    /// Phase `e^{2i theta}` on `|e>` and `e^{-2i theta}` on `|r^2>`.
    TracePhase { link: LinkQubits, theta: f64, controls: Vec<usize> },
    /// Group basis to irrep basis; `adjoint` maps back.
    Fourier { link: LinkQubits, adjoint: bool },
    /// Irrep-basis diagonal `lambda_j^{i dt}` on the slots of irrep `j`.
    KineticPhase { link: LinkQubits, dt: f64, log_eigenvalues: [f64; 5], controls: Vec<usize> },
    /// Exact `e^{-iHt}` on the link registers.
    Evolution { time: f64, controls: Vec<usize> },
}

fn inverse_perm() -> Vec<usize> {
    (0..8).map(|g| GroupElement::from_index(g).inv().index()).collect()
}

fn mult_perm(inverse: bool) -> Vec<usize> {
    (0..64)
        .map(|x| {
            let (g, h) = (GroupElement::from_index(x & 7), GroupElement::from_index(x >> 3));
            let g = if inverse { g.inv() } else { g };
            (x & 7) | ((g * h).index() << 3)
        })
        .collect()
}

fn trace_phases(theta: f64) -> Vec<C64> {
    let mut p = vec![ONE; 8];
    p[GroupElement::E.index()] = cis(2.0 * theta);
    p[GroupElement::R2.index()] = cis(-2.0 * theta);
    p
}

fn kinetic_phases(dt: f64, logs: &[f64; 5]) -> Vec<C64> {
    (0..8)
        .map(|s| cis(dt * logs[IrrepSlot::from_index(s).irrep.index()]))
        .collect()
}

fn hadamard() -> CMatrix {
    let h = C64::new(1.0 / sqrt(2.0), 0.0);
    CMatrix::from_row_slice(2, 2, &[h, h, h, -h])
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

impl Gate {
    pub fn name(&self) -> &'static str {
        match self {
            Gate::Hadamard { .. } => "h",
            Gate::Swap { .. } => "swap",
            Gate::Phase { .. } => "phase",
            Gate::ControlledPhase { .. } => "cphase",
            Gate::Inverse { .. } => "inv",
            Gate::Mult { inverse: false, .. } => "mult",
            Gate::Mult { inverse: true, .. } => "mult_inv",
            Gate::TracePhase { .. } => "trace_phase",
            Gate::Fourier { adjoint: false, .. } => "fourier",
            Gate::Fourier { adjoint: true, .. } => "fourier_dag",
            Gate::KineticPhase { .. } => "kinetic_phase",
            Gate::Evolution { .. } => "evolution",
        }
    }

    /// Control qubits, empty for uncontrolled gates.
    pub fn controls(&self) -> Vec<usize> {
        match self {
            Gate::ControlledPhase { control, .. } => vec![*control],
            Gate::TracePhase { controls, .. }
            | Gate::KineticPhase { controls, .. }
            | Gate::Evolution { controls, .. } => controls.clone(),
            _ => Vec::new(),
        }
    }

    /// Target qubits in local-index order.
    pub fn targets(&self) -> Vec<usize> {
        match self {
            Gate::Hadamard { qubit } | Gate::Phase { qubit, .. } => vec![*qubit],
            Gate::Swap { a, b } => vec![*a, *b],
            Gate::ControlledPhase { target, .. } => vec![*target],
            Gate::Inverse { link }
            | Gate::TracePhase { link, .. }
            | Gate::Fourier { link, .. }
            | Gate::KineticPhase { link, .. } => link.to_vec(),
            Gate::Mult { src, dst, .. } => concat(src, dst),
            Gate::Evolution { .. } => (0..SYSTEM_QUBITS).collect(),
        }
    }

    /// Named real parameters.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match self {
            Gate::Phase { angle, .. } | Gate::ControlledPhase { angle, .. } => vec![("angle", *angle)],
            Gate::TracePhase { theta, .. } => vec![("theta", *theta)],
            Gate::KineticPhase { dt, .. } => vec![("dt", *dt)],
            Gate::Evolution { time, .. } => vec![("time", *time)],
            _ => Vec::new(),
        }
    }

    pub fn adjoint(&self) -> Gate {
        match self.clone() {
            Gate::Phase { qubit, angle } => Gate::Phase { qubit, angle: -angle },
            Gate::ControlledPhase { control, target, angle } => Gate::ControlledPhase {
                control,
                target,
                angle: -angle,
            },
            Gate::Mult { src, dst, inverse } => Gate::Mult {
                src,
                dst,
                inverse: !inverse,
            },
            Gate::TracePhase { link, theta, controls } => Gate::TracePhase {
                link,
                theta: -theta,
                controls,
            },
            Gate::Fourier { link, adjoint } => Gate::Fourier {
                link,
                adjoint: !adjoint,
            },
            Gate::KineticPhase {
                link,
                dt,
                log_eigenvalues,
                controls,
            } => Gate::KineticPhase {
                link,
                dt: -dt,
                log_eigenvalues,
                controls,
            },
            Gate::Evolution { time, controls } => Gate::Evolution { time: -time, controls },
            g => g,
        }
    }

    /// Apply to `state`; [`Gate::Evolution`] needs the sector decomposition.
    pub fn apply(&self, state: &mut StateVector, exact: Option<&SectorDecomposition>) -> Result<()> {
        match self {
            Gate::Hadamard { qubit } => state.apply_unitary(&[*qubit], &hadamard()),
            Gate::Swap { a, b } => state.apply_permutation(&[], &[*a, *b], &[0, 2, 1, 3]),
            Gate::Phase { qubit, angle } => state.apply_diagonal(&[*qubit], &[ONE, cis(*angle)]),
            Gate::ControlledPhase { control, target, angle } => {
                state.apply_controlled_diagonal(&[*control], &[*target], &[ONE, cis(*angle)])
            }
            Gate::Inverse { link } => state.apply_permutation(&[], link, &inverse_perm()),
            Gate::Mult { src, dst, inverse } => {
                if src.iter().any(|q| dst.contains(q)) {
                    return Err(Error::invalid("mult", "source and destination overlap"));
                }
                state.apply_permutation(&[], &concat(src, dst), &mult_perm(*inverse))
            }
            Gate::TracePhase { link, theta, controls } => {
                state.apply_controlled_diagonal(controls, link, &trace_phases(*theta))
            }
            Gate::Fourier { link, adjoint } => {
                let f = FourierMatrix::new().gate();
                let u = if *adjoint { f.adjoint() } else { f };
                state.apply_unitary(link, &u)
            }
            Gate::KineticPhase {
                link,
                dt,
                log_eigenvalues,
                controls,
            } => state.apply_controlled_diagonal(controls, link, &kinetic_phases(*dt, log_eigenvalues)),
            Gate::Evolution { time, controls } => {
                let dec = exact.ok_or_else(|| Error::invalid("evolution", "exact propagator not supplied"))?;
                apply_exact_evolution(state, dec, *time, controls)
            }
        }
    }
}

fn apply_exact_evolution(
    state: &mut StateVector,
    dec: &SectorDecomposition,
    time: f64,
    controls: &[usize],
) -> Result<()> {
    let block = dec.dim();
    if block != 1 << SYSTEM_QUBITS || state.len() % block != 0 {
        return Err(Error::DimensionMismatch {
            expected: 1 << SYSTEM_QUBITS,
            found: block,
        });
    }
    if let Some(&q) = controls.iter().find(|&&q| q < SYSTEM_QUBITS || q >= state.num_qubits()) {
        return Err(Error::QubitOutOfRange {
            qubit: q,
            len: state.num_qubits(),
        });
    }
    let cmask = controls.iter().fold(0usize, |m, &q| m | (1 << q));
    let amps = state.amplitudes_mut();
    for start in (0..amps.len()).step_by(block) {
        if start & cmask != cmask {
            continue;
        }
        let chunk = &mut amps[start..start + block];
        if chunk.iter().all(|a| *a == ZERO) {
            continue;
        }
        let out = dec.propagate(time, chunk);
        chunk.copy_from_slice(&out);
    }
    Ok(())
}

/// An ordered gate list.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn append(&mut self, other: &Circuit) {
        self.gates.extend(other.gates.iter().cloned());
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn adjoint(&self) -> Circuit {
        Circuit {
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        self.apply_with(state, None)
    }

    pub fn apply_with(&self, state: &mut StateVector, exact: Option<&SectorDecomposition>) -> Result<()> {
        self.gates.iter().try_for_each(|g| g.apply(state, exact))
    }

    /// Short human-readable listing, one gate per line.
    pub fn describe(&self) -> String {
        use core::fmt::Write;
        let mut s = String::new();
        for g in &self.gates {
            let _ = write!(s, "{} {:?}", g.name(), g.targets());
            let c = g.controls();
            if !c.is_empty() {
                let _ = write!(s, " ctrl {c:?}");
            }
            for (k, v) in g.params() {
                let _ = write!(s, " {k}={v}");
            }
            s.push('\n');
        }
        s
    }
}

impl FromIterator<Gate> for Circuit {
    fn from_iter<I: IntoIterator<Item = Gate>>(iter: I) -> Self {
        Circuit {
            gates: iter.into_iter().collect(),
        }
    }
}

impl Extend<Gate> for Circuit {
    fn extend<I: IntoIterator<Item = Gate>>(&mut self, iter: I) {
        self.gates.extend(iter);
    }
}
