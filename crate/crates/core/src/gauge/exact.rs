use alloc::vec;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use super::{GaugeModel, LatticeSpec, PlaquetteId};
use crate::d4::GroupElement;
use crate::math::{exp, RMatrix, C64};
use crate::{Error, Result};

/// Default absolute tolerance for merging eigenvalues into one level.
pub const DEGENERACY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevel {
    pub energy: f64,
    pub multiplicity: usize,
}

/// Spectrum of the Hamiltonian restricted to gauge-invariant states, in the orbit basis.
#[derive(Clone, Debug)]
pub struct ExactSpectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: RMatrix,
    levels: Vec<EnergyLevel>,
    level_of: Vec<usize>,
}

/// Group eigenvalues (sorted ascending) into levels. Fails when two neighbouring levels are
/// closer than ten times the tolerance.
pub fn cluster_levels(sorted: &[f64], tol: f64) -> Result<(Vec<EnergyLevel>, Vec<usize>)> {
    let mut levels: Vec<(f64, usize, f64)> = Vec::new(); // (sum, count, last)
    let mut level_of = Vec::with_capacity(sorted.len());
    for &e in sorted {
        match levels.last_mut() {
            Some((sum, count, last)) if e - *last <= tol => {
                *sum += e;
                *count += 1;
                *last = e;
            }
            Some((_, _, last)) if e - *last <= 10.0 * tol => {
                return Err(Error::AmbiguousClustering { a: *last, b: e });
            }
            _ => levels.push((e, 1, e)),
        }
        level_of.push(levels.len() - 1);
    }
    let levels = levels
        .into_iter()
        .map(|(sum, count, _)| EnergyLevel {
            energy: sum / count as f64,
            multiplicity: count,
        })
        .collect();
    Ok((levels, level_of))
}

/// Boltzmann factors `exp(-beta (E - E_min))` for a list of energies.
fn boltzmann(energies: impl Iterator<Item = f64> + Clone, beta: f64) -> Vec<f64> {
    let emin = energies.clone().fold(f64::INFINITY, f64::min);
    energies.map(|e| exp(-beta * (e - emin))).collect()
}

impl ExactSpectrum {
    pub fn compute(model: &GaugeModel) -> Result<Self> {
        Self::with_tolerance(model, DEGENERACY_TOL)
    }

    pub fn with_tolerance(model: &GaugeModel, tol: f64) -> Result<Self> {
        let h_phys = model.physical_hamiltonian();
        let eig = SymmetricEigen::new(h_phys);
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let eigenvectors = RMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let (levels, level_of) = cluster_levels(&eigenvalues, tol)?;
        Ok(Self {
            eigenvalues,
            eigenvectors,
            levels,
            level_of,
        })
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues with repetition.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are eigenvectors in the orbit basis, matching [`eigenvalues`](Self::eigenvalues).
    pub fn eigenvectors(&self) -> &RMatrix {
        &self.eigenvectors
    }

    pub fn levels(&self) -> &[EnergyLevel] {
        &self.levels
    }

    pub fn level_of(&self, k: usize) -> usize {
        self.level_of[k]
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// Gibbs weight of each level, `mu_k exp(-beta E_k) / Z`.
    pub fn gibbs_weights(&self, beta: f64) -> Vec<f64> {
        let b = boltzmann(self.levels.iter().map(|l| l.energy), beta);
        let w: Vec<f64> = b
            .iter()
            .zip(&self.levels)
            .map(|(x, l)| x * l.multiplicity as f64)
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// Boltzmann weight of each distinct level ignoring multiplicities,
    /// `exp(-beta E_k) / sum_k' exp(-beta E_k')`.
    pub fn level_boltzmann_weights(&self, beta: f64) -> Vec<f64> {
        let b = boltzmann(self.levels.iter().map(|l| l.energy), beta);
        let z: f64 = b.iter().sum();
        b.into_iter().map(|x| x / z).collect()
    }

    /// Thermal average of an observable that is diagonal in the orbit basis.
    pub fn thermal_average_orbit_diagonal(&self, beta: f64, orbit_values: &[f64]) -> f64 {
        let w = boltzmann(self.eigenvalues.iter().copied(), beta);
        let z: f64 = w.iter().sum();
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            let diag: f64 = v.iter().zip(orbit_values).map(|(c, o)| c * c * o).sum();
            acc += wk * diag;
        }
        acc / z
    }

    /// `Tr[O e^{-beta H}] / Tr[e^{-beta H}]` on the physical subspace, `O` in the orbit basis.
    pub fn thermal_average(&self, beta: f64, observable: &RMatrix) -> f64 {
        let w = boltzmann(self.eigenvalues.iter().copied(), beta);
        let z: f64 = w.iter().sum();
        let rotated = self.eigenvectors.transpose() * observable * &self.eigenvectors;
        w.iter().enumerate().map(|(k, wk)| wk * rotated[(k, k)]).sum::<f64>() / z
    }

    pub fn mean_energy(&self, beta: f64) -> f64 {
        let w = self.gibbs_weights(beta);
        w.iter().zip(&self.levels).map(|(w, l)| w * l.energy).sum()
    }

    /// Amplitudes of eigenvector `k` in the orbit basis.
    pub fn eigenvector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors
            .column(k)
            .iter()
            .map(|&x| C64::new(x, 0.0))
            .collect()
    }
}

/// Eigenvalues of `Re Tr rho_f(P)` for a plaquette, in the order used throughout: `-2, 0, +2`.
pub const PLAQUETTE_VALUES: [i32; 3] = [-2, 0, 2];

/// Which of the three plaquette eigenspaces basis state `x` belongs to.
pub fn plaquette_class(lattice: &LatticeSpec, id: PlaquetteId, x: usize) -> usize {
    let g = LatticeSpec::path_product(&lattice.plaquette(id).steps, x);
    match g {
        GroupElement::E => 2,
        GroupElement::R2 => 0,
        _ => 1,
    }
}

/// Thermal probabilities `(p_-2, p_0, p_+2)` of the plaquette eigenspaces.
pub fn plaquette_eigenspace_probs(
    model: &GaugeModel,
    spectrum: &ExactSpectrum,
    id: PlaquetteId,
    beta: f64,
) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let means = model
            .action()
            .orbit_means(|x| (plaquette_class(model.lattice(), id, x) == c) as u8 as f64);
        *o = spectrum.thermal_average_orbit_diagonal(beta, &means);
    }
    out
}

/// Thermal average of `Re Tr rho_f(P)`.
pub fn plaquette_trace_mean(model: &GaugeModel, spectrum: &ExactSpectrum, id: PlaquetteId, beta: f64) -> f64 {
    let means = model
        .action()
        .orbit_means(|x| LatticeSpec::loop_trace(&model.lattice().plaquette(id).steps, x));
    spectrum.thermal_average_orbit_diagonal(beta, &means)
}

/// Exact thermal expectations compared against sampled chains.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalReference {
    pub beta: f64,
    pub mean_energy: f64,
    /// `(p_-2, p_0, p_+2)`.
    pub plaquette_probs: [f64; 3],
    pub plaquette_trace: f64,
}

pub fn thermal_reference(model: &GaugeModel, spectrum: &ExactSpectrum, id: PlaquetteId, beta: f64) -> ThermalReference {
    ThermalReference {
        beta,
        mean_energy: spectrum.mean_energy(beta),
        plaquette_probs: plaquette_eigenspace_probs(model, spectrum, id, beta),
        plaquette_trace: plaquette_trace_mean(model, spectrum, id, beta),
    }
}

/// Orbit-basis diagonal of a diagonal link-basis observable.
pub fn orbit_diagonal(model: &GaugeModel, observable: impl Fn(usize) -> f64) -> Vec<f64> {
    model.action().orbit_means(observable)
}

/// Physical Gibbs state probabilities in the orbit basis (diagonal of the density matrix).
pub fn gibbs_orbit_populations(spectrum: &ExactSpectrum, beta: f64) -> Vec<f64> {
    let w = boltzmann(spectrum.eigenvalues.iter().copied(), beta);
    let z: f64 = w.iter().sum();
    let n = spectrum.dim();
    let mut out = vec![0.0; n];
    for (k, wk) in w.iter().enumerate() {
        for (o, c) in out.iter_mut().zip(spectrum.eigenvectors.column(k).iter()) {
            *o += wk * c * c / z;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::HamiltonianSpec;

    fn model() -> GaugeModel {
        GaugeModel::new(HamiltonianSpec::default())
    }

    #[test]
    fn clustering_examples() {
        let (levels, of) = cluster_levels(&[0.0, 1e-10, 1.0, 2.0, 2.0], 1e-8).unwrap();
        assert_eq!(levels.len(), 3);
        assert_eq!(levels[0].multiplicity, 2);
        assert_eq!(levels[2].multiplicity, 2);
        assert_eq!(of, [0, 0, 1, 2, 2]);
        assert!(cluster_levels(&[0.0, 5e-8], 1e-8).is_err());
    }

    #[test]
    fn spectrum_extrema_and_multiplicity() {
        let m = model();
        let s = ExactSpectrum::compute(&m).unwrap();
        assert_eq!(s.dim(), 176);
        let total: usize = s.levels().iter().map(|l| l.multiplicity).sum();
        assert_eq!(total, 176);
        assert!((s.min() - -11.172).abs() < 2e-3);
        assert!((s.max() - -1.998).abs() < 2e-3);
        // numpy oracle: -11.171665111, -1.997720493, 51 levels
        assert!((s.min() - -11.171665111).abs() < 1e-8);
        assert!((s.max() - -1.997720493).abs() < 1e-8);
        assert_eq!(s.levels().len(), 51);
    }

    #[test]
    fn eigenvectors_are_physical() {
        let m = model();
        let s = ExactSpectrum::compute(&m).unwrap();
        for k in [0, 17, 100, 175] {
            let v = m.action().embed(&s.eigenvector(k));
            assert!(m.action().residual(&v) < 1e-12);
            let hv = m.hamiltonian().apply(&v);
            let err = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * s.eigenvalues()[k]).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn plaquette_reference_rows() {
        let m = model();
        let s = ExactSpectrum::compute(&m).unwrap();
        let rows = [
            (1e-7, [0.15909, 0.68182, 0.15909]),
            (0.1, [0.12331, 0.67295, 0.20374]),
            (0.5, [0.04349, 0.49712, 0.45940]),
        ];
        for (beta, want) in rows {
            let p = plaquette_eigenspace_probs(&m, &s, PlaquetteId::Left, beta);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for c in 0..3 {
                assert!((p[c] - want[c]).abs() < 1e-4, "beta {beta}: {p:?}");
            }
            let right = plaquette_eigenspace_probs(&m, &s, PlaquetteId::Right, beta);
            for c in 0..3 {
                assert!((p[c] - right[c]).abs() < 1e-10);
            }
            let tr = plaquette_trace_mean(&m, &s, PlaquetteId::Left, beta);
            assert!((tr - 2.0 * (p[2] - p[0])).abs() < 1e-12);
        }
        assert!(plaquette_trace_mean(&m, &s, PlaquetteId::Left, 1e-7).abs() < 1e-6);
    }

    #[test]
    fn gibbs_weights_normalized() {
        let s = ExactSpectrum::compute(&model()).unwrap();
        for beta in [0.0, 0.1, 0.5, 5.0] {
            let w = s.gibbs_weights(beta);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            let pops = gibbs_orbit_populations(&s, beta);
            assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
        let w0 = s.gibbs_weights(0.0);
        for (w, l) in w0.iter().zip(s.levels()) {
            assert!((w - l.multiplicity as f64 / 176.0).abs() < 1e-14);
        }
    }

    #[test]
    fn matrix_and_diagonal_averages_agree() {
        let m = model();
        let s = ExactSpectrum::compute(&m).unwrap();
        let diag = orbit_diagonal(&m, |x| LatticeSpec::loop_trace(&m.lattice().plaquette(PlaquetteId::Left).steps, x));
        let mat = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag.clone()));
        let a = s.thermal_average(0.3, &mat);
        let b = s.thermal_average_orbit_diagonal(0.3, &diag);
        assert!((a - b).abs() < 1e-12);
    }
}
