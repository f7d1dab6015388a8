use crate::circuits::QpeGrid;
use crate::gauge::PlaquetteId;
use crate::math::exp;
use crate::statevector::RngStream;
use crate::Result;

use super::Move;

/// Operations the Metropolis chain needs from an emulator.
///
/// Every measurement consumes exactly one uniform draw (the plaquette measurement consumes one
/// or two), so two backends holding the same state produce identical outcome streams.
pub trait QmsBackend {
    fn grid(&self) -> &QpeGrid;

    /// Uniform superposition on the links, every other register zero.
    fn prepare(&mut self) -> Result<()>;

    fn apply_move(&mut self, mv: Move) -> Result<()>;

    /// Phase estimation into the energy register, or its inverse.
    fn apply_qpe(&mut self, adjoint: bool) -> Result<()>;

    /// Rotate the acceptance qubit so that `|1>` has weight `min(1, e^{-beta (E_j - E_current)})`
    /// on energy-register value `j`.
    fn apply_acceptance(&mut self, current: usize, beta: f64, adjoint: bool) -> Result<()>;

    /// Measure the acceptance qubit; `true` means accepted.
    fn measure_accept(&mut self, rng: &mut RngStream) -> Result<bool>;

    /// Binary measurement of "energy register and acceptance qubit are both zero".
    fn measure_ancillas_zero(&mut self, rng: &mut RngStream) -> Result<bool>;

    /// Binary measurement of "energy register within `m_tol` sites of `center`".
    fn measure_energy_window(&mut self, center: usize, m_tol: usize, rng: &mut RngStream) -> Result<bool>;

    fn measure_energy(&mut self, rng: &mut RngStream) -> Result<usize>;

    /// Return energy register and acceptance qubit to zero. Both must be in a basis state.
    fn reset_ancillas(&mut self) -> Result<()>;

    /// Gauge-invariant measurement of `Re Tr` of a plaquette; returns -2, 0 or 2.
    fn measure_plaquette(&mut self, id: PlaquetteId, rng: &mut RngStream) -> Result<i8>;

    /// `1 - <psi|P_phys|psi>`.
    fn gauge_residual(&self) -> f64;
}

/// `min(1, e^{-beta (E_j - E_i)})` on grid energies.
pub fn acceptance_probability(grid: &QpeGrid, beta: f64, current: usize, j: usize) -> f64 {
    let de = grid.energy(j) - grid.energy(current);
    if de <= 0.0 {
        1.0
    } else {
        exp(-beta * de)
    }
}

/// `(cos, sin)` of the acceptance rotation for each energy value.
pub(crate) fn acceptance_angles(grid: &QpeGrid, beta: f64, current: usize) -> alloc::vec::Vec<(f64, f64)> {
    (0..grid.size())
        .map(|j| {
            let p = acceptance_probability(grid, beta, current, j);
            (crate::math::sqrt(1.0 - p), crate::math::sqrt(p))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceptance_examples() {
        let g = QpeGrid::new(3, 0.0, 7.0).unwrap();
        assert_eq!(acceptance_probability(&g, 0.0, 0, 7), 1.0);
        assert_eq!(acceptance_probability(&g, 0.5, 5, 2), 1.0);
        assert!((acceptance_probability(&g, 0.5, 2, 4) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((acceptance_probability(&g, 0.5, 2, 4) - 0.3679).abs() < 1e-4);
    }
}
