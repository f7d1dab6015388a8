use alloc::vec;
use alloc::vec::Vec;

use super::distribution::{DistributionEstimate, Provenance};
use crate::circuits::{qpe_distribution, QpeGrid};
use crate::gauge::EnergyLevel;
use crate::math::{exp, sqrt};

/// Boltzmann factors `m_k e^{-beta (E_k - E_0)}` normalized to 1.
fn normalized_boltzmann(energies: &[f64], multiplicities: impl Iterator<Item = f64>, beta: f64) -> Vec<f64> {
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies
        .iter()
        .zip(multiplicities)
        .map(|(e, m)| m * exp(-beta * (e - e0)))
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Gibbs weights `mu_k e^{-beta E_k} / Z` of the levels.
pub fn gibbs_level_weights(levels: &[EnergyLevel], beta: f64) -> Vec<f64> {
    let e: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    normalized_boltzmann(&e, levels.iter().map(|l| l.multiplicity as f64), beta)
}

/// Exact thermal distribution as point masses on the level energies.
pub fn exact_distribution(levels: &[EnergyLevel], beta: f64) -> DistributionEstimate {
    DistributionEstimate::masses(
        levels.iter().map(|l| l.energy).collect(),
        gibbs_level_weights(levels, beta),
        Provenance::Exact,
    )
}

/// Prediction of the sampled energy distribution when every level is read through
/// phase estimation.
#[derive(Clone, Debug, PartialEq)]
pub struct QpeDistortion {
    /// `E~_k = sum_j |c_kj|^2 E_j`.
    pub distorted_levels: Vec<f64>,
    /// `w~_k = mu_k e^{-beta E~_k} / Z~`.
    pub weights: Vec<f64>,
    /// `p_j = sum_k |c_kj|^2 w~_k`.
    pub grid_masses: Vec<f64>,
    /// `sum_k E~_k w~_k`.
    pub mean_energy: f64,
}

impl QpeDistortion {
    pub fn distribution(&self, grid: &QpeGrid) -> DistributionEstimate {
        DistributionEstimate::masses(grid.energies(), self.grid_masses.clone(), Provenance::QpeDistorted)
    }
}

pub fn qpe_distortion_model(levels: &[EnergyLevel], grid: &QpeGrid, beta: f64) -> QpeDistortion {
    let sites = grid.energies();
    let coeffs: Vec<Vec<f64>> = levels.iter().map(|l| qpe_distribution(l.energy, grid)).collect();
    let distorted_levels: Vec<f64> = coeffs
        .iter()
        .map(|c| c.iter().zip(&sites).map(|(p, e)| p * e).sum())
        .collect();
    let weights = normalized_boltzmann(&distorted_levels, levels.iter().map(|l| l.multiplicity as f64), beta);
    let mut grid_masses = vec![0.0; grid.size()];
    for (c, w) in coeffs.iter().zip(&weights) {
        grid_masses.iter_mut().zip(c).for_each(|(p, ckj)| *p += ckj * w);
    }
    let mean_energy = distorted_levels.iter().zip(&weights).map(|(e, w)| e * w).sum();
    QpeDistortion {
        distorted_levels,
        weights,
        grid_masses,
        mean_energy,
    }
}

/// Grid site most likely to be read out for each level.
pub fn dominant_sites(levels: &[EnergyLevel], grid: &QpeGrid) -> Vec<usize> {
    levels
        .iter()
        .map(|l| {
            let c = qpe_distribution(l.energy, grid);
            (0..c.len()).fold(0, |best, j| if c[j] > c[best] { j } else { best })
        })
        .collect()
}

/// Level weights entering GridDist.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LevelWeighting {
    /// `e^{-beta sigma_k}` over distinct levels, normalized.
    #[default]
    Distinct,
    /// `mu_k e^{-beta sigma_k}`, normalized (the physical Gibbs weights).
    Multiplicity,
}

/// `sum_k p_k sqrt(sum_j |sigma_k - x_j|^2 |c_kj|^2)`.
pub fn grid_dist(levels: &[EnergyLevel], grid: &QpeGrid, beta: f64, weighting: LevelWeighting) -> f64 {
    let e: Vec<f64> = levels.iter().map(|l| l.energy).collect();
    let weights = match weighting {
        LevelWeighting::Distinct => normalized_boltzmann(&e, levels.iter().map(|_| 1.0), beta),
        LevelWeighting::Multiplicity => gibbs_level_weights(levels, beta),
    };
    let sites = grid.energies();
    levels
        .iter()
        .zip(&weights)
        .map(|(l, p)| {
            let c = qpe_distribution(l.energy, grid);
            let ms: f64 = sites
                .iter()
                .zip(&c)
                .map(|(x, ckj)| (l.energy - x) * (l.energy - x) * ckj)
                .sum();
            p * sqrt(ms)
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::qpe_coefficient;
    use proptest::prelude::*;

    fn lvl(energy: f64, multiplicity: usize) -> EnergyLevel {
        EnergyLevel { energy, multiplicity }
    }

    #[test]
    fn beta_zero_weights_follow_multiplicities() {
        let g = QpeGrid::with_default_range(3).unwrap();
        let levels = [lvl(-10.3, 1), lvl(-4.2, 3), lvl(-1.1, 4)];
        let m = qpe_distortion_model(&levels, &g, 0.0);
        assert!((m.weights[0] - 0.125).abs() < 1e-15);
        assert!((m.weights[1] - 0.375).abs() < 1e-15);
        let expect: Vec<f64> = (0..8)
            .map(|j| {
                levels
                    .iter()
                    .map(|l| qpe_coefficient(l.energy, j, &g) * l.multiplicity as f64 / 8.0)
                    .sum()
            })
            .collect();
        for (a, b) in m.grid_masses.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn on_grid_spectrum_is_undistorted() {
        let g = QpeGrid::with_default_range(3).unwrap();
        let levels = [lvl(g.energy(1), 2), lvl(g.energy(5), 1), lvl(g.energy(6), 3)];
        let beta = 0.3;
        let m = qpe_distortion_model(&levels, &g, beta);
        let exact = gibbs_level_weights(&levels, beta);
        assert!((m.grid_masses[1] - exact[0]).abs() < 1e-12);
        assert!((m.grid_masses[5] - exact[1]).abs() < 1e-12);
        assert!((m.grid_masses[6] - exact[2]).abs() < 1e-12);
        let mean: f64 = levels.iter().zip(&exact).map(|(l, w)| l.energy * w).sum();
        assert!((m.mean_energy - mean).abs() < 1e-12);
        assert!(grid_dist(&levels, &g, beta, LevelWeighting::Distinct) < 1e-12);
        assert!(grid_dist(&levels, &g, beta, LevelWeighting::Multiplicity) < 1e-12);
    }

    #[test]
    fn single_midpoint_level() {
        let g = QpeGrid::with_default_range(4).unwrap();
        let sigma = 0.5 * (g.energy(6) + g.energy(7));
        let direct: f64 = (0..16)
            .map(|j| (sigma - g.energy(j)).powi(2) * qpe_coefficient(sigma, j, &g))
            .sum::<f64>()
            .sqrt();
        let got = grid_dist(&[lvl(sigma, 5)], &g, 0.5, LevelWeighting::Distinct);
        assert!((got - direct).abs() < 1e-14);
        assert!(got > 0.5 * g.spacing());
    }

    #[test]
    fn dominant_site_is_nearest() {
        let g = QpeGrid::with_default_range(3).unwrap();
        let levels = [lvl(g.energy(2) + 0.3 * g.spacing(), 1), lvl(g.energy(6) - 0.2 * g.spacing(), 1)];
        assert_eq!(dominant_sites(&levels, &g), vec![2, 6]);
    }

    proptest! {
        #[test]
        fn masses_normalized(q in 3usize..8, beta in prop::sample::select(vec![0.0, 1e-7, 0.1, 0.5]),
                             raw in prop::collection::vec((-12.9f64..-0.1, 1usize..6), 1..20)) {
            let g = QpeGrid::with_default_range(q).unwrap();
            let levels: Vec<EnergyLevel> = raw.into_iter().map(|(e, m)| lvl(e, m)).collect();
            let m = qpe_distortion_model(&levels, &g, beta);
            prop_assert!((m.grid_masses.iter().sum::<f64>() - 1.0).abs() < 1e-10);
            prop_assert!((m.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn grid_dist_vanishes_near_sites(q in 3usize..8, sites in prop::collection::vec(0usize..128, 1..10),
                                         frac in -1.0f64..1.0) {
            let g = QpeGrid::with_default_range(q).unwrap();
            let levels: Vec<EnergyLevel> = sites
                .iter()
                .map(|&j| lvl(g.energy(j % g.size()) + frac * 1e-6 * g.spacing(), 1))
                .collect();
            // a level just outside the grid wraps onto the far site, contributing ~ 2^q * 1e-6 * spacing
            prop_assert!(grid_dist(&levels, &g, 0.5, LevelWeighting::Distinct) < 1e-3 * g.spacing());
        }
    }
}
