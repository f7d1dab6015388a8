use alloc::vec::Vec;

use super::backend::{acceptance_angles, QmsBackend};
use super::{Move, MoveSet};
use crate::circuits::{plaquette_basis_change, qpe_circuit, standard_links, Circuit, EvolutionMode, LinkQubits, QpeGrid};
use crate::gauge::{GaugeModel, PlaquetteId, SectorDecomposition};
use crate::math::{C64, ZERO};
use crate::statevector::{RegisterLayout, RngStream, StateVector};
use crate::{Error, Result};

/// Gate-level chain state: links (12 qubits), energy register, acceptance qubit, auxiliary qubit.
#[derive(Clone, Debug)]
pub struct CircuitBackend<'a> {
    model: &'a GaugeModel,
    moves: &'a MoveSet,
    exact: Option<&'a SectorDecomposition>,
    grid: QpeGrid,
    links: Vec<LinkQubits>,
    energy: Vec<usize>,
    acc: usize,
    aux: usize,
    qpe: Circuit,
    qpe_dag: Circuit,
    plaquettes: [(Circuit, Circuit); 2],
    state: StateVector,
}

impl<'a> CircuitBackend<'a> {
    /// `exact` must be supplied when `mode` is [`EvolutionMode::Exact`].
    pub fn new(
        model: &'a GaugeModel,
        moves: &'a MoveSet,
        grid: QpeGrid,
        mode: EvolutionMode,
        exact: Option<&'a SectorDecomposition>,
    ) -> Result<Self> {
        if mode == EvolutionMode::Exact && exact.is_none() {
            return Err(Error::invalid("backend", "exact evolution needs the sector decomposition"));
        }
        let layout = RegisterLayout::new()
            .with("links", 3 * model.lattice().num_links())?
            .with("energy", grid.qubits())?
            .with("acc", 1)?
            .with("aux", 1)?;
        let links = standard_links(model.lattice().num_links());
        let energy = layout.get("energy")?.qubit_list();
        let acc = layout.get("acc")?.qubit(0);
        let aux = layout.get("aux")?.qubit(0);
        let qpe = qpe_circuit(model.lattice(), model.spec(), &grid, &energy, &links, mode)?;
        let qpe_dag = qpe.adjoint();
        let basis = |id| -> Result<(Circuit, Circuit)> {
            let s = plaquette_basis_change(model.lattice(), id, &links)?;
            let s_dag = s.adjoint();
            Ok((s, s_dag))
        };
        let plaquettes = [basis(PlaquetteId::Left)?, basis(PlaquetteId::Right)?];
        Ok(Self {
            model,
            moves,
            exact,
            grid,
            links,
            energy,
            acc,
            aux,
            qpe,
            qpe_dag,
            plaquettes,
            state: StateVector::new(layout),
        })
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    pub fn qpe(&self) -> &Circuit {
        &self.qpe
    }

    fn link_qubits(&self) -> Vec<usize> {
        self.links.iter().flatten().copied().collect()
    }
}

impl QmsBackend for CircuitBackend<'_> {
    fn grid(&self) -> &QpeGrid {
        &self.grid
    }

    fn prepare(&mut self) -> Result<()> {
        let len = self.state.len();
        let amps = self.state.amplitudes_mut();
        amps.iter_mut().for_each(|a| *a = ZERO);
        let dim = 1usize << (3 * self.links.len());
        let a = C64::new(1.0 / crate::math::sqrt(dim as f64), 0.0);
        amps[..dim.min(len)].iter_mut().for_each(|x| *x = a);
        Ok(())
    }

    fn apply_move(&mut self, mv: Move) -> Result<()> {
        match mv {
            Move::R1 | Move::R1Dag => {
                let phases = self.moves.r1_phases(mv == Move::R1Dag);
                let qubits = self.link_qubits();
                self.state.apply_diagonal(&qubits, &phases)
            }
            Move::R2 | Move::R2Dag => {
                for (l, q) in self.links.iter().enumerate() {
                    self.state.apply_unitary(q, self.moves.r2_link(l, mv == Move::R2Dag))?;
                }
                Ok(())
            }
        }
    }

    fn apply_qpe(&mut self, adjoint: bool) -> Result<()> {
        let c = if adjoint { &self.qpe_dag } else { &self.qpe };
        c.apply_with(&mut self.state, self.exact)
    }

    fn apply_acceptance(&mut self, current: usize, beta: f64, adjoint: bool) -> Result<()> {
        let gates: Vec<[C64; 4]> = acceptance_angles(&self.grid, beta, current)
            .into_iter()
            .map(|(c, s)| {
                let s = if adjoint { -s } else { s };
                [C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)]
            })
            .collect();
        self.state.apply_multiplexed(&self.energy, self.acc, &gates)
    }

    fn measure_accept(&mut self, rng: &mut RngStream) -> Result<bool> {
        self.state.measure_predicate(&[self.acc], |v| v == 1, rng)
    }

    fn measure_ancillas_zero(&mut self, rng: &mut RngStream) -> Result<bool> {
        let mut qubits = self.energy.clone();
        qubits.push(self.acc);
        self.state.measure_predicate(&qubits, |v| v == 0, rng)
    }

    fn measure_energy_window(&mut self, center: usize, m_tol: usize, rng: &mut RngStream) -> Result<bool> {
        self.state
            .measure_predicate(&self.energy, |e| e.abs_diff(center) <= m_tol, rng)
    }

    fn measure_energy(&mut self, rng: &mut RngStream) -> Result<usize> {
        self.state.measure(&self.energy, rng)
    }

    fn reset_ancillas(&mut self) -> Result<()> {
        let mut qubits = self.energy.clone();
        qubits.push(self.acc);
        let probs = self.state.probabilities(&qubits);
        let mut nonzero = probs.iter().enumerate().filter(|(_, p)| **p > 0.0);
        let (v, _) = nonzero
            .next()
            .ok_or_else(|| Error::invalid("reset", "empty state"))?;
        if nonzero.next().is_some() {
            return Err(Error::invalid("reset", "ancillas are not in a basis state"));
        }
        for (bit, &q) in qubits.iter().enumerate() {
            if (v >> bit) & 1 == 1 {
                self.state.apply_permutation(&[], &[q], &[1, 0])?;
            }
        }
        Ok(())
    }

    fn measure_plaquette(&mut self, id: PlaquetteId, rng: &mut RngStream) -> Result<i8> {
        let (s, s_dag) = &self.plaquettes[id.index()];
        let central = self.links[self.model.lattice().plaquette(id).central];
        s.apply(&mut self.state)?;
        // aux <- 1 when the loop product is e or r^2, i.e. its x0 and x2 bits are clear
        let mut perm = [0, 1, 2, 3, 4, 5, 6, 7];
        perm.swap(0, 4);
        self.state.apply_permutation(&[], &[central[0], central[2], self.aux], &perm)?;
        let m1 = self.state.measure(&[self.aux], rng)?;
        let value = if m1 == 1 {
            let m2 = self.state.measure(&[central[1]], rng)?;
            self.state.apply_permutation(&[], &[self.aux], &[1, 0])?;
            if m2 == 0 {
                2
            } else {
                -2
            }
        } else {
            0
        };
        s_dag.apply(&mut self.state)?;
        Ok(value)
    }

    fn gauge_residual(&self) -> f64 {
        self.model.action().residual(self.state.amplitudes())
    }
}
