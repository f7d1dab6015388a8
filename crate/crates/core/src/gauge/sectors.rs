use alloc::vec;
use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use super::{GaugeAction, GaugeModel};
use crate::d4::{character, fund_rep, GroupElement, IrrepLabel};
use crate::math::{cis, sqrt, RMatrix, C64, ZERO};

/// Vector supported on a single gauge orbit, coefficients in the orbit's member order.
#[derive(Clone, Debug)]
struct OrbitVec {
    orbit: u32,
    coeffs: Vec<f64>,
}

/// One isotypic component of the gauge action, labelled by an irrep pair `(a, b)` of the
/// gauge group `D4 x D4`. The Hamiltonian acts on it as `d` identical `m x m` blocks.
#[derive(Clone, Debug)]
pub struct Sector {
    pub irreps: (IrrepLabel, IrrepLabel),
    /// Irrep dimension `d_a d_b`: number of identical copies.
    pub copies: usize,
    /// Block size `m`.
    pub multiplicity: usize,
    basis: Vec<Vec<OrbitVec>>,
    eigenvalues: Vec<f64>,
    eigenvectors: RMatrix,
}

impl Sector {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.copies * self.multiplicity
    }
}

/// Exact eigendecomposition of the full (extended) Hamiltonian, assembled sector by sector.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    orbits: Vec<Vec<u16>>,
    sectors: Vec<Sector>,
    dim: usize,
}

fn irrep_matrix(j: IrrepLabel, g: GroupElement) -> [[f64; 2]; 2] {
    if j.dim() == 2 {
        fund_rep(g)
    } else {
        [[character(j, g) as f64, 0.0], [0.0, 0.0]]
    }
}

/// `rho_{(a,b)}(t)_{mu, nu}` with `mu = mu_a d_b + mu_b`.
fn pair_entry(a: IrrepLabel, b: IrrepLabel, t: (GroupElement, GroupElement), mu: usize, nu: usize) -> f64 {
    let db = b.dim();
    let (ma, mb) = (mu / db, mu % db);
    let (na, nb) = (nu / db, nu % db);
    irrep_matrix(a, t.0)[ma][na] * irrep_matrix(b, t.1)[mb][nb]
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SectorDecomposition {
    pub fn compute(model: &GaugeModel) -> Self {
        let action = model.action();
        assert_eq!(action.num_vertices(), 2, "sector labels assume two vertices");
        let dim = action.dim();
        let orbits: Vec<Vec<u16>> = action.orbits().to_vec();
        let mut position = vec![0usize; dim];
        for orbit in &orbits {
            for (p, &x) in orbit.iter().enumerate() {
                position[x as usize] = p;
            }
        }
        // pi(t) = U_{t^-1} is a homomorphism; store its permutation per transform
        let transforms: Vec<((GroupElement, GroupElement), &[u16])> = (0..64)
            .map(|t| {
                let g = GaugeAction::decode(t, 2);
                let inv = GaugeAction::encode(&[g[0].inv(), g[1].inv()]);
                ((g[0], g[1]), action.permutation(inv))
            })
            .collect();

        let mut sectors = Vec::new();
        for a in IrrepLabel::all() {
            for b in IrrepLabel::all() {
                let d = a.dim() * b.dim();
                let scale = d as f64 / 64.0;
                // E_{mu 0} applied to an orbit-local vector
                let unit = |mu: usize, orbit: usize, v: &[f64]| -> Vec<f64> {
                    let mut out = vec![0.0; v.len()];
                    for &(t, perm) in &transforms {
                        let c = scale * pair_entry(a, b, t, mu, 0);
                        if c == 0.0 {
                            continue;
                        }
                        for (p, &x) in orbits[orbit].iter().enumerate() {
                            if v[p] != 0.0 {
                                out[position[perm[x as usize] as usize]] += c * v[p];
                            }
                        }
                    }
                    out
                };
                let mut first: Vec<OrbitVec> = Vec::new();
                for (o, orbit) in orbits.iter().enumerate() {
                    let mut kept: Vec<Vec<f64>> = Vec::new();
                    for p in 0..orbit.len() {
                        let mut e = vec![0.0; orbit.len()];
                        e[p] = 1.0;
                        let mut v = unit(0, o, &e);
                        for _ in 0..2 {
                            for k in &kept {
                                let c = dot(k, &v);
                                v.iter_mut().zip(k).for_each(|(x, y)| *x -= c * y);
                            }
                        }
                        let n = sqrt(dot(&v, &v));
                        if n > 1e-8 {
                            v.iter_mut().for_each(|x| *x /= n);
                            kept.push(v);
                        }
                    }
                    first.extend(kept.into_iter().map(|coeffs| OrbitVec {
                        orbit: o as u32,
                        coeffs,
                    }));
                }
                let m = first.len();
                if m == 0 {
                    continue;
                }
                let mut basis = vec![first];
                for mu in 1..d {
                    let copy = basis[0]
                        .iter()
                        .map(|w| OrbitVec {
                            orbit: w.orbit,
                            coeffs: unit(mu, w.orbit as usize, &w.coeffs),
                        })
                        .collect();
                    basis.push(copy);
                }
                let block = Self::block(model, &orbits, &basis[0], dim);
                let eig = SymmetricEigen::new(block);
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
                sectors.push(Sector {
                    irreps: (a, b),
                    copies: d,
                    multiplicity: m,
                    basis,
                    eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
                    eigenvectors: RMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]),
                });
            }
        }
        Self {
            orbits,
            sectors,
            dim,
        }
    }

    fn block(model: &GaugeModel, orbits: &[Vec<u16>], vecs: &[OrbitVec], dim: usize) -> RMatrix {
        let m = vecs.len();
        let mut block = RMatrix::zeros(m, m);
        let mut dense = vec![0.0; dim];
        let mut hv = vec![0.0; dim];
        for (j, w) in vecs.iter().enumerate() {
            dense.iter_mut().for_each(|x| *x = 0.0);
            for (&x, &c) in orbits[w.orbit as usize].iter().zip(&w.coeffs) {
                dense[x as usize] = c;
            }
            model.hamiltonian().apply_real(&dense, &mut hv);
            for (i, u) in vecs.iter().enumerate() {
                block[(i, j)] = orbits[u.orbit as usize]
                    .iter()
                    .zip(&u.coeffs)
                    .map(|(&x, &c)| c * hv[x as usize])
                    .sum();
            }
        }
        (&block + block.transpose()) * 0.5
    }

    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The gauge-invariant sector.
    pub fn physical(&self) -> &Sector {
        let trivial = IrrepLabel::from_index(0);
        self.sectors
            .iter()
            .find(|s| s.irreps == (trivial, trivial))
            .expect("trivial sector present")
    }

    /// All eigenvalues of the extended Hamiltonian, ascending, with multiplicity.
    pub fn extended_eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .sectors
            .iter()
            .flat_map(|s| s.eigenvalues.iter().flat_map(move |&e| core::iter::repeat(e).take(s.copies)))
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    /// `f(H) psi` for each `dim`-sized block of `psi`.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; psi.len()];
        let phases: Vec<Vec<C64>> = self
            .sectors
            .iter()
            .map(|s| s.eigenvalues.iter().map(|&e| f(e)).collect())
            .collect();
        for (src, dst) in psi.chunks(self.dim).zip(out.chunks_mut(self.dim)) {
            for (s, ph) in self.sectors.iter().zip(&phases) {
                let m = s.multiplicity;
                let mut coeffs = vec![ZERO; m];
                let mut rotated = vec![ZERO; m];
                for copy in &s.basis {
                    for (c, w) in coeffs.iter_mut().zip(copy) {
                        *c = self.orbits[w.orbit as usize]
                            .iter()
                            .zip(&w.coeffs)
                            .map(|(&x, &v)| src[x as usize] * v)
                            .sum();
                    }
                    for (k, r) in rotated.iter_mut().enumerate() {
                        let col = s.eigenvectors.column(k);
                        let proj: C64 = col.iter().zip(&coeffs).map(|(&v, c)| c * v).sum();
                        *r = proj * ph[k];
                    }
                    for (i, w) in copy.iter().enumerate() {
                        let row = s.eigenvectors.row(i);
                        let c: C64 = row.iter().zip(&rotated).map(|(&v, r)| r * v).sum();
                        for (&x, &v) in self.orbits[w.orbit as usize].iter().zip(&w.coeffs) {
                            dst[x as usize] += c * v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Exact `e^{-iHt} psi`.
    pub fn propagate(&self, t: f64, psi: &[C64]) -> Vec<C64> {
        self.apply_function(|e| cis(-e * t), psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::{ExactSpectrum, HamiltonianSpec};
    use crate::math::norm_sqr;
    use crate::statevector::RngStream;

    fn random_vec(n: usize, rng: &mut RngStream) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
            .collect()
    }

    #[test]
    fn decomposition_is_complete_and_exact() {
        let model = GaugeModel::new(HamiltonianSpec::default());
        let dec = SectorDecomposition::compute(&model);
        let total: usize = dec.sectors().iter().map(|s| s.dim()).sum();
        assert_eq!(total, 4096);
        assert_eq!(dec.sectors().len(), 17);
        assert_eq!(dec.physical().multiplicity, 176);

        let mut rng = RngStream::new(21, 0);
        let psi = random_vec(4096, &mut rng);
        let id = dec.apply_function(|_| C64::new(1.0, 0.0), &psi);
        let err = id.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);

        let h_sector = dec.apply_function(|e| C64::new(e, 0.0), &psi);
        let h_direct = model.hamiltonian().apply(&psi);
        let err = h_sector.iter().zip(&h_direct).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);

        let evolved = dec.propagate(0.7, &psi);
        assert!((norm_sqr(&evolved) - norm_sqr(&psi)).abs() < 1e-10);
        let back = dec.propagate(-0.7, &evolved);
        let err = back.iter().zip(&psi).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn physical_sector_matches_orbit_spectrum() {
        let model = GaugeModel::new(HamiltonianSpec::default());
        let dec = SectorDecomposition::compute(&model);
        let spec = ExactSpectrum::compute(&model).unwrap();
        for (a, b) in dec.physical().eigenvalues().iter().zip(spec.eigenvalues()) {
            assert!((a - b).abs() < 1e-10);
        }
        let ext = dec.extended_eigenvalues();
        assert_eq!(ext.len(), 4096);
        assert!(ext[0] <= spec.min() + 1e-12);
    }
}
