use alloc::vec;
use alloc::vec::Vec;

use super::LatticeSpec;
use crate::d4::GroupElement;
use crate::math::{sqrt, C64, ZERO};

/// One group element per vertex.
pub type GaugeAssignment = Vec<GroupElement>;

/// Basis permutation of a local gauge transformation:
/// every link `U: tail -> head` becomes `g_head^-1 U g_tail`.
///
/// With this convention applying `a` after `b` equals the transformation of the
/// pointwise product `b a`.
pub fn gauge_transform_operator(lattice: &LatticeSpec, assignment: &[GroupElement]) -> Vec<u16> {
    assert_eq!(assignment.len(), lattice.num_vertices, "one element per vertex");
    (0..lattice.basis_dim())
        .map(|x| {
            let values: Vec<GroupElement> = lattice
                .links
                .iter()
                .enumerate()
                .map(|(l, link)| {
                    assignment[link.head].inv() * LatticeSpec::link_value(x, l) * assignment[link.tail]
                })
                .collect();
            LatticeSpec::index_of(&values) as u16
        })
        .collect()
}

/// All gauge transformations of the lattice, their orbits on the link basis,
/// and the orthonormal basis of gauge-invariant states built from orbit indicators.
#[derive(Clone, Debug)]
pub struct GaugeAction {
    num_vertices: usize,
    dim: usize,
    perms: Vec<Vec<u16>>,
    orbit_of: Vec<u32>,
    orbits: Vec<Vec<u16>>,
}

impl GaugeAction {
    pub fn new(lattice: &LatticeSpec) -> Self {
        let nv = lattice.num_vertices;
        let count = 8usize.pow(nv as u32);
        let perms: Vec<Vec<u16>> = (0..count)
            .map(|t| gauge_transform_operator(lattice, &Self::decode(t, nv)))
            .collect();
        let dim = lattice.basis_dim();
        let mut orbit_of = vec![u32::MAX; dim];
        let mut orbits: Vec<Vec<u16>> = Vec::new();
        for x in 0..dim {
            if orbit_of[x] != u32::MAX {
                continue;
            }
            let id = orbits.len() as u32;
            let mut members: Vec<u16> = perms.iter().map(|p| p[x]).collect();
            members.sort_unstable();
            members.dedup();
            for &m in &members {
                orbit_of[m as usize] = id;
            }
            orbits.push(members);
        }
        Self {
            num_vertices: nv,
            dim,
            perms,
            orbit_of,
            orbits,
        }
    }

    /// Assignment for transform index `t = sum_v g_v 8^v`.
    pub fn decode(t: usize, num_vertices: usize) -> GaugeAssignment {
        (0..num_vertices)
            .map(|v| GroupElement::from_index((t >> (3 * v)) & 7))
            .collect()
    }

    pub fn encode(assignment: &[GroupElement]) -> usize {
        assignment
            .iter()
            .enumerate()
            .fold(0, |acc, (v, g)| acc | (g.index() << (3 * v)))
    }

    pub fn num_transforms(&self) -> usize {
        self.perms.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn permutation(&self, t: usize) -> &[u16] {
        &self.perms[t]
    }

    pub fn orbits(&self) -> &[Vec<u16>] {
        &self.orbits
    }

    pub fn orbit_of(&self, x: usize) -> usize {
        self.orbit_of[x] as usize
    }

    /// Dimension of the gauge-invariant subspace.
    pub fn physical_dim(&self) -> usize {
        self.orbits.len()
    }

    /// `psi -> U_t psi` on a block of `dim` amplitudes.
    pub fn apply(&self, t: usize, input: &[C64], out: &mut [C64]) {
        for (x, &y) in self.perms[t].iter().enumerate() {
            out[y as usize] = input[x];
        }
    }

    /// Group average `(1/|G|^|V|) sum_t U_t`, which equals the orbit-block projector.
    pub fn project(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; psi.len()];
        for block in 0..psi.len() / self.dim {
            let range = block * self.dim..(block + 1) * self.dim;
            let src = &psi[range.clone()];
            let dst = &mut out[range];
            for orbit in &self.orbits {
                let mean: C64 =
                    orbit.iter().map(|&x| src[x as usize]).sum::<C64>() / orbit.len() as f64;
                for &x in orbit {
                    dst[x as usize] = mean;
                }
            }
        }
        out
    }

    /// Group average computed literally as the sum over all transforms.
    pub fn project_by_averaging(&self, psi: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; psi.len()];
        let mut buf = vec![ZERO; self.dim];
        let w = 1.0 / self.perms.len() as f64;
        for block in 0..psi.len() / self.dim {
            let range = block * self.dim..(block + 1) * self.dim;
            for t in 0..self.perms.len() {
                self.apply(t, &psi[range.clone()], &mut buf);
                for (o, b) in out[range.clone()].iter_mut().zip(&buf) {
                    *o += b * w;
                }
            }
        }
        out
    }

    /// `1 - <psi|P_phys|psi> / <psi|psi>` via the transform average, for a vector whose
    /// lowest `log2(dim)` qubits are the links (any trailing registers are spectators).
    pub fn residual(&self, psi: &[C64]) -> f64 {
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        let mut overlap = 0.0;
        for block in psi.chunks(self.dim) {
            for perm in &self.perms {
                overlap += perm
                    .iter()
                    .enumerate()
                    .map(|(x, &y)| (block[y as usize].conj() * block[x]).re)
                    .sum::<f64>();
            }
        }
        let overlap = overlap / self.perms.len() as f64;
        (1.0 - overlap / norm).max(0.0)
    }

    /// Embed physical coordinates (one per orbit) into the link basis.
    pub fn embed(&self, coords: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; self.dim];
        for (orbit, &c) in self.orbits.iter().zip(coords) {
            let a = c / sqrt(orbit.len() as f64);
            for &x in orbit {
                out[x as usize] = a;
            }
        }
        out
    }

    /// Coordinates of the projection onto the gauge-invariant subspace.
    pub fn coordinates(&self, psi: &[C64]) -> Vec<C64> {
        self.orbits
            .iter()
            .map(|orbit| {
                orbit.iter().map(|&x| psi[x as usize]).sum::<C64>() / sqrt(orbit.len() as f64)
            })
            .collect()
    }

    /// Mean of a diagonal observable over each orbit, i.e. the diagonal of `P O P`
    /// in the orbit basis.
    pub fn orbit_means(&self, observable: impl Fn(usize) -> f64) -> Vec<f64> {
        self.orbits
            .iter()
            .map(|orbit| {
                orbit.iter().map(|&x| observable(x as usize)).sum::<f64>() / orbit.len() as f64
            })
            .collect()
    }
}

/// `sum_C (|G| / |C|)^{|E| - |V|}` over conjugacy classes.
pub fn physical_dim_closed_form(lattice: &LatticeSpec) -> usize {
    let exponent = (lattice.num_links() - lattice.num_vertices) as u32;
    crate::d4::CLASS_SIZES
        .iter()
        .map(|&c| (8 / c).pow(exponent))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauge::PlaquetteId;
    use crate::statevector::RngStream;
    use GroupElement as G;

    fn action() -> (LatticeSpec, GaugeAction) {
        let l = LatticeSpec::periodic_2x1();
        let a = GaugeAction::new(&l);
        (l, a)
    }

    fn random_vec(n: usize, rng: &mut RngStream) -> Vec<C64> {
        (0..n)
            .map(|_| C64::new(rng.uniform() - 0.5, rng.uniform() - 0.5))
            .collect()
    }

    #[test]
    fn identity_assignment() {
        let l = LatticeSpec::periodic_2x1();
        let p = gauge_transform_operator(&l, &[G::E, G::E]);
        assert!(p.iter().enumerate().all(|(x, &y)| x == y as usize));
    }

    #[test]
    fn composition_law() {
        let (_, a) = action();
        for s in 0..64 {
            for t in 0..64 {
                let (ga, gb) = (GaugeAction::decode(s, 2), GaugeAction::decode(t, 2));
                let prod: Vec<G> = gb.iter().zip(&ga).map(|(b, a)| *b * *a).collect();
                let composed = a.permutation(GaugeAction::encode(&prod));
                let (ps, pt) = (a.permutation(s), a.permutation(t));
                for x in 0..4096 {
                    assert_eq!(ps[pt[x] as usize], composed[x]);
                }
            }
        }
    }

    #[test]
    fn plaquette_traces_invariant() {
        let (l, a) = action();
        for t in 0..64 {
            let p = a.permutation(t);
            for pl in &l.plaquettes {
                for x in 0..4096 {
                    let before = LatticeSpec::loop_trace(&pl.steps, x);
                    let after = LatticeSpec::loop_trace(&pl.steps, p[x] as usize);
                    assert_eq!(before, after);
                }
            }
        }
        let _ = PlaquetteId::Left;
    }

    #[test]
    fn physical_dimension() {
        let (l, a) = action();
        assert_eq!(a.physical_dim(), 176);
        assert_eq!(physical_dim_closed_form(&l), 64 + 16 + 64 + 16 + 16);
        assert_eq!(physical_dim_closed_form(&l), 176);
    }

    #[test]
    fn projector_is_group_average_and_idempotent() {
        let (_, a) = action();
        let mut rng = RngStream::new(11, 0);
        let v = random_vec(4096, &mut rng);
        let p1 = a.project(&v);
        let p2 = a.project_by_averaging(&v);
        assert!(p1.iter().zip(&p2).all(|(x, y)| (x - y).norm() < 1e-13));
        let pp = a.project(&p1);
        assert!(p1.iter().zip(&pp).all(|(x, y)| (x - y).norm() < 1e-13));
        // trace of the orbit-block projector
        let trace: f64 = a.orbits().iter().map(|o| o.len() as f64 / o.len() as f64).sum();
        assert_eq!(trace.round() as usize, 176);
    }

    #[test]
    fn uniform_state_is_invariant() {
        let (_, a) = action();
        let u = vec![C64::new(1.0 / 64.0, 0.0); 4096];
        let p = a.project(&u);
        assert!(u.iter().zip(&p).all(|(x, y)| (x - y).norm() < 1e-15));
        assert!(a.residual(&u) < 1e-12);
    }

    #[test]
    fn single_basis_state_is_not_invariant() {
        let (_, a) = action();
        let mut v = vec![C64::new(0.0, 0.0); 4096];
        v[LatticeSpec::index_of(&[G::R, G::E, G::E, G::E])] = C64::new(1.0, 0.0);
        let orbit = a.orbits()[a.orbit_of(1)].len() as f64;
        assert!((a.residual(&v) - (1.0 - 1.0 / orbit)).abs() < 1e-12);
        assert!(a.residual(&v) > 0.0);
    }

    #[test]
    fn embed_and_coordinates_roundtrip() {
        let (_, a) = action();
        let mut rng = RngStream::new(12, 0);
        let c = random_vec(176, &mut rng);
        let back = a.coordinates(&a.embed(&c));
        assert!(c.iter().zip(&back).all(|(x, y)| (x - y).norm() < 1e-13));
    }
}
