//! Lattice geometry, gauge action, Hamiltonian and the exact-diagonalization oracle.

mod exact;
mod hamiltonian;
mod lattice;
mod sectors;
mod transform;

pub use exact::{
    cluster_levels, gibbs_orbit_populations, orbit_diagonal, plaquette_class,
    plaquette_eigenspace_probs, plaquette_trace_mean, thermal_reference, EnergyLevel, ExactSpectrum,
    ThermalReference, DEGENERACY_TOL, PLAQUETTE_VALUES,
};
pub use hamiltonian::{Hamiltonian, HamiltonianSpec};
pub use lattice::{Axis, LatticeSpec, Link, LoopStep, Plaquette, PlaquetteId, LINK_QUBITS};
pub use sectors::{Sector, SectorDecomposition};
pub use transform::{gauge_transform_operator, physical_dim_closed_form, GaugeAction, GaugeAssignment};

use crate::math::{C64, RMatrix};

/// Lattice, Hamiltonian and gauge action bundled together.
#[derive(Clone, Debug)]
pub struct GaugeModel {
    lattice: LatticeSpec,
    hamiltonian: Hamiltonian,
    action: GaugeAction,
}

impl GaugeModel {
    pub fn new(spec: HamiltonianSpec) -> Self {
        let lattice = LatticeSpec::periodic_2x1();
        let hamiltonian = Hamiltonian::new(spec, &lattice);
        let action = GaugeAction::new(&lattice);
        Self {
            lattice,
            hamiltonian,
            action,
        }
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn spec(&self) -> HamiltonianSpec {
        self.hamiltonian.spec()
    }

    pub fn action(&self) -> &GaugeAction {
        &self.action
    }

    pub fn physical_dim(&self) -> usize {
        self.action.physical_dim()
    }

    /// `<O|H|O'>` over normalized orbit indicators.
    pub fn physical_hamiltonian(&self) -> RMatrix {
        let n = self.physical_dim();
        let mut m = RMatrix::zeros(n, n);
        let mut unit = alloc::vec![C64::new(0.0, 0.0); n];
        for col in 0..n {
            unit[col] = C64::new(1.0, 0.0);
            let v = self.action.embed(&unit);
            let hv = self.hamiltonian.apply(&v);
            let coords = self.action.coordinates(&hv);
            for (row, c) in coords.iter().enumerate() {
                m[(row, col)] = c.re;
            }
            unit[col] = C64::new(0.0, 0.0);
        }
        // symmetrize away rounding
        (&m + m.transpose()) * 0.5
    }
}
