use alloc::vec::Vec;

use super::{trotter_evolution, Circuit, Gate, LinkQubits, TrotterParams};
use crate::gauge::{HamiltonianSpec, LatticeSpec};
use crate::math::{round, sin, PI};
use crate::{Error, Result};

/// Uniform energy grid read out by phase estimation. Site `j` sits at `e_min + j * spacing`
/// and corresponds to the phase `j / 2^q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QpeGrid {
    qubits: usize,
    e_min: f64,
    e_max: f64,
}

impl QpeGrid {
    pub const DEFAULT_MIN: f64 = -13.0;
    pub const DEFAULT_MAX: f64 = 0.0;
    pub const MAX_QUBITS: usize = 16;

    pub fn new(qubits: usize, e_min: f64, e_max: f64) -> Result<Self> {
        if qubits == 0 || qubits > Self::MAX_QUBITS {
            return Err(Error::invalid("qe", "energy register width out of range"));
        }
        if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) {
            return Err(Error::invalid("grid", "need finite bounds with e_min < e_max"));
        }
        Ok(Self { qubits, e_min, e_max })
    }

    /// Grid on the default range `[-13, 0]`.
    pub fn with_default_range(qubits: usize) -> Result<Self> {
        Self::new(qubits, Self::DEFAULT_MIN, Self::DEFAULT_MAX)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn size(&self) -> usize {
        1 << self.qubits
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn spacing(&self) -> f64 {
        (self.e_max - self.e_min) / (self.size() - 1) as f64
    }

    pub fn energy(&self, j: usize) -> f64 {
        self.e_min + self.spacing() * j as f64
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.size()).map(|j| self.energy(j)).collect()
    }

    /// Evolution time of one phase-estimation unit, `2 pi / (spacing 2^q)`.
    pub fn unit_time(&self) -> f64 {
        2.0 * PI / (self.spacing() * self.size() as f64)
    }

    /// Site index of a value that must lie on the grid.
    pub fn index_of(&self, value: f64) -> Result<usize> {
        let x = (value - self.e_min) / self.spacing();
        let j = round(x);
        if (x - j).abs() > 1e-6 || j < 0.0 || j >= self.size() as f64 {
            return Err(Error::OffGrid { value });
        }
        Ok(j as usize)
    }

    /// Sites within `m_tol` grid units of `j`.
    pub fn within(&self, j: usize, k: usize, m_tol: usize) -> bool {
        j.abs_diff(k) <= m_tol
    }
}

/// Probability that phase estimation of an eigenstate with energy `e` returns site `j`:
/// `sin^2(pi d) / (4^q sin^2(pi d / 2^q))` with `d = (e - E_j) / spacing`.
pub fn qpe_coefficient(e: f64, j: usize, grid: &QpeGrid) -> f64 {
    let n = grid.size() as f64;
    let d = (e - grid.energy(j)) / grid.spacing();
    let den = sin(PI * d / n);
    if den.abs() < 1e-12 {
        return 1.0;
    }
    let num = sin(PI * d);
    (num * num) / (n * n * den * den)
}

/// All outcome probabilities for energy `e`.
pub fn qpe_distribution(e: f64, grid: &QpeGrid) -> Vec<f64> {
    (0..grid.size()).map(|j| qpe_coefficient(e, j, grid)).collect()
}

/// Quantum Fourier transform `|x> -> 2^{-n/2} sum_y e^{2 pi i x y / 2^n} |y>` on `qubits`
/// (least significant first).
pub fn qft(qubits: &[usize]) -> Circuit {
    let n = qubits.len();
    let mut c = Circuit::new();
    for i in (0..n).rev() {
        c.push(Gate::Hadamard { qubit: qubits[i] });
        for k in (0..i).rev() {
            c.push(Gate::ControlledPhase {
                control: qubits[k],
                target: qubits[i],
                angle: PI / (1u64 << (i - k)) as f64,
            });
        }
    }
    for i in 0..n / 2 {
        c.push(Gate::Swap {
            a: qubits[i],
            b: qubits[n - 1 - i],
        });
    }
    c
}

pub fn inverse_qft(qubits: &[usize]) -> Circuit {
    qft(qubits).adjoint()
}

/// How the controlled time evolution inside phase estimation is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvolutionMode {
    /// Repeated second-order Trotter units.
    Trotter(TrotterParams),
    /// Exact propagator (needs a sector decomposition when applied).
    Exact,
}

/// Phase estimation onto `grid`, without the final measurement.
///
/// Each unit is `e^{iH t0} e^{-i e_min t0}`, so an eigenstate of energy `E` picks up the phase
/// `(E - e_min) / (spacing 2^q)`. The power `2^m` controlled by `energy[m]` is `2^m` repeated units.
pub fn qpe_circuit(
    lattice: &LatticeSpec,
    spec: HamiltonianSpec,
    grid: &QpeGrid,
    energy: &[usize],
    links: &[LinkQubits],
    mode: EvolutionMode,
) -> Result<Circuit> {
    if energy.len() != grid.qubits() {
        return Err(Error::DimensionMismatch {
            expected: grid.qubits(),
            found: energy.len(),
        });
    }
    let t0 = grid.unit_time();
    let mut c = Circuit::new();
    c.extend(energy.iter().map(|&q| Gate::Hadamard { qubit: q }));
    for (m, &ctrl) in energy.iter().enumerate() {
        let reps = 1usize << m;
        match mode {
            EvolutionMode::Trotter(p) => {
                let unit = trotter_evolution(lattice, spec, -t0, p, links, &[ctrl])?;
                for _ in 0..reps {
                    c.append(&unit);
                }
            }
            EvolutionMode::Exact => c.push(Gate::Evolution {
                time: -t0 * reps as f64,
                controls: alloc::vec![ctrl],
            }),
        }
        c.push(Gate::Phase {
            qubit: ctrl,
            angle: -grid.e_min() * t0 * reps as f64,
        });
    }
    c.append(&inverse_qft(energy));
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::standard_links;
    use crate::gauge::{ExactSpectrum, GaugeModel, SectorDecomposition};
    use crate::math::{cis, sqrt, C64, ONE, ZERO};
    use crate::statevector::{RegisterLayout, RngStream, StateVector};

    #[test]
    fn grid_basics() {
        let g = QpeGrid::with_default_range(5).unwrap();
        assert!((g.spacing() - 13.0 / 31.0).abs() < 1e-15);
        assert_eq!(g.energy(0), -13.0);
        assert!((g.energy(31) - 0.0).abs() < 1e-12);
        assert_eq!(g.index_of(g.energy(17)).unwrap(), 17);
        assert!(g.index_of(g.energy(3) + 0.1).is_err());
        assert!(QpeGrid::new(3, 1.0, 1.0).is_err());
        assert!(QpeGrid::new(0, -1.0, 1.0).is_err());
        // tolerance window half-width at m_tol = 3
        assert!((3.0 * g.spacing() - 1.258).abs() < 1e-3);
    }

    #[test]
    fn coefficient_limits_and_normalization() {
        let g = QpeGrid::with_default_range(7).unwrap();
        for j in [0, 5, 127] {
            let p = qpe_distribution(g.energy(j), &g);
            assert!((p[j] - 1.0).abs() < 1e-12);
            assert!(p.iter().enumerate().all(|(k, &x)| k == j || x < 1e-20));
        }
        let mid = 0.5 * (g.energy(40) + g.energy(41));
        let p = qpe_distribution(mid, &g);
        // half-spacing offset: sin^2(pi/2) / (4^q sin^2(pi / 2^{q+1}))
        let want = 1.0 / (16384.0 * sin(PI / 256.0).powi(2));
        assert!((p[40] - want).abs() < 1e-11 && (p[41] - want).abs() < 1e-11);
        assert!((p[40] - 4.0 / (PI * PI)).abs() < 1e-4);
        for e in [-12.3, -7.77, -0.01, -11.171665] {
            let s: f64 = qpe_distribution(e, &g).iter().sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn qft_matches_dense_dft() {
        let n = 4;
        let dim = 1 << n;
        let layout = RegisterLayout::new().with("e", n).unwrap();
        let qubits: Vec<usize> = (0..n).collect();
        let c = qft(&qubits);
        for x in 0..dim {
            let mut s = StateVector::basis(layout.clone(), x);
            c.apply(&mut s).unwrap();
            for y in 0..dim {
                let want = cis(2.0 * PI * (x * y) as f64 / dim as f64) / sqrt(dim as f64);
                assert!((s.amplitudes()[y] - want).norm() < 1e-12);
            }
        }
        let mut s = StateVector::basis(layout, 5);
        c.apply(&mut s).unwrap();
        inverse_qft(&qubits).apply(&mut s).unwrap();
        assert!((s.amplitudes()[5] - ONE).norm() < 1e-12);
    }

    fn system_with_energy(q: usize) -> (RegisterLayout, Vec<usize>) {
        let mut layout = RegisterLayout::new().with("links", 12).unwrap();
        let e = layout.push("energy", q).unwrap();
        (layout, e.collect())
    }

    fn prepared(layout: &RegisterLayout, psi: &[C64]) -> StateVector {
        let mut amps = alloc::vec![ZERO; 1 << layout.num_qubits()];
        amps[..psi.len()].copy_from_slice(psi);
        StateVector::from_amplitudes(layout.clone(), amps).unwrap()
    }

    #[test]
    fn exact_qpe_matches_coefficients_on_random_eigenstates() {
        let model = GaugeModel::new(HamiltonianSpec::default());
        let dec = SectorDecomposition::compute(&model);
        let spectrum = ExactSpectrum::compute(&model).unwrap();
        let grid = QpeGrid::with_default_range(4).unwrap();
        let (layout, energy) = system_with_energy(4);
        let c = qpe_circuit(model.lattice(), model.spec(), &grid, &energy, &standard_links(4), EvolutionMode::Exact)
            .unwrap();
        let mut rng = RngStream::new(99, 0);
        for _ in 0..5 {
            let k = rng.below(spectrum.dim());
            let psi = model.action().embed(&spectrum.eigenvector(k));
            let mut s = prepared(&layout, &psi);
            c.apply_with(&mut s, Some(&dec)).unwrap();
            let p = s.probabilities(&energy);
            for (j, pj) in p.iter().enumerate() {
                assert!((pj - qpe_coefficient(spectrum.eigenvalues()[k], j, &grid)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exact_qpe_on_grid_eigenvalue_is_deterministic() {
        let model = GaugeModel::new(HamiltonianSpec::default());
        let dec = SectorDecomposition::compute(&model);
        let spectrum = ExactSpectrum::compute(&model).unwrap();
        let e0 = spectrum.min();
        let grid = QpeGrid::new(3, e0 - 2.0 * 1.5, e0 + 5.0 * 1.5).unwrap();
        assert_eq!(grid.index_of(e0).unwrap(), 2);
        let (layout, energy) = system_with_energy(3);
        let c = qpe_circuit(model.lattice(), model.spec(), &grid, &energy, &standard_links(4), EvolutionMode::Exact)
            .unwrap();
        let psi = model.action().embed(&spectrum.eigenvector(0));
        let mut s = prepared(&layout, &psi);
        c.apply_with(&mut s, Some(&dec)).unwrap();
        let p = s.probabilities(&energy);
        assert!((p[2] - 1.0).abs() < 1e-10);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(s.measure(&energy, &mut rng).unwrap(), 2);
        // system register left in the eigenstate
        let sys = &s.amplitudes()[2 << 12..3 << 12];
        let overlap: C64 = sys.iter().zip(&psi).map(|(a, b)| a * b.conj()).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn trotter_qpe_close_to_exact() {
        let model = GaugeModel::new(HamiltonianSpec::default());
        let spectrum = ExactSpectrum::compute(&model).unwrap();
        let grid = QpeGrid::with_default_range(3).unwrap();
        let (layout, energy) = system_with_energy(3);
        let c = qpe_circuit(
            model.lattice(),
            model.spec(),
            &grid,
            &energy,
            &standard_links(4),
            EvolutionMode::Trotter(TrotterParams::default()),
        )
        .unwrap();
        for k in [0, 88, 175] {
            let psi = model.action().embed(&spectrum.eigenvector(k));
            let mut s = prepared(&layout, &psi);
            c.apply(&mut s).unwrap();
            let p = s.probabilities(&energy);
            let tv: f64 = p
                .iter()
                .enumerate()
                .map(|(j, pj)| (pj - qpe_coefficient(spectrum.eigenvalues()[k], j, &grid)).abs())
                .sum::<f64>()
                / 2.0;
            assert!(tv < 0.02, "level {k}: total variation {tv}");
            assert!((s.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trotter_step_is_twice_the_quoted_scale() {
        // dt = t0 / N = 2 pi (1 - 2^-q) / (N dE); the quoted scale has pi in place of 2 pi
        for q in 3..=7 {
            let g = QpeGrid::with_default_range(q).unwrap();
            let dt = g.unit_time() / 10.0;
            let quoted = PI * (1.0 - 1.0 / g.size() as f64) / (10.0 * 13.0);
            assert!((dt / quoted - 2.0).abs() < 1e-12);
        }
    }
}
