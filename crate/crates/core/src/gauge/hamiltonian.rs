use alloc::vec;
use alloc::vec::Vec;

use super::{LatticeSpec, LINK_QUBITS};
use crate::d4::{character, fund_trace, FourierMatrix, GroupElement, IrrepLabel};
use crate::math::{cosh, exp, ln, ln_1p, sinh, RMatrix, C64, ZERO};
use crate::{Error, Result};

/// Coupling of the Kogut-Susskind Hamiltonian `H = H_V + H_K`, given as `beta_g = 1/g^2`.
///
/// The kinetic term is `H_K = -ln T_K` with no zero-mode shift.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianSpec {
    inv_coupling: f64,
}

impl HamiltonianSpec {
    pub const DEFAULT_INV_COUPLING: f64 = 0.8;

    pub fn new(inv_coupling: f64) -> Result<Self> {
        if !(inv_coupling > 0.0 && inv_coupling.is_finite()) {
            return Err(Error::invalid("inv_coupling", "must be positive and finite"));
        }
        Ok(Self { inv_coupling })
    }

    pub fn inv_coupling(&self) -> f64 {
        self.inv_coupling
    }

    /// Single-link transfer matrix `<U'|T|U> = exp(beta_g Tr rho_f(U'^-1 U))`.
    pub fn transfer_matrix(&self) -> RMatrix {
        RMatrix::from_fn(8, 8, |a, b| {
            let (u1, u) = (GroupElement::from_index(a), GroupElement::from_index(b));
            exp(self.inv_coupling * fund_trace(u1.inv() * u))
        })
    }

    /// Eigenvalue of the transfer matrix on each irrep, in closed form:
    /// `6 + 2 cosh 2b`, `4 sinh^2 b` (three times), `2 sinh 2b`.
    pub fn transfer_eigenvalues(&self) -> [f64; 5] {
        let b = self.inv_coupling;
        let s = sinh(b);
        [6.0 + 2.0 * cosh(2.0 * b), 4.0 * s * s, 4.0 * s * s, 4.0 * s * s, 2.0 * sinh(2.0 * b)]
    }

    /// Same eigenvalues from character orthogonality,
    /// `(1/d_j) sum_g exp(b/2 (chi_f(g) + chi_f(g^-1))) chi_j(g)`.
    pub fn transfer_eigenvalues_by_characters(&self) -> [f64; 5] {
        let mut out = [0.0; 5];
        for j in IrrepLabel::all() {
            let sum: f64 = GroupElement::all()
                .map(|g| {
                    let chi_f = 0.5 * (fund_trace(g) + fund_trace(g.inv()));
                    exp(self.inv_coupling * chi_f) * character(j, g) as f64
                })
                .sum();
            out[j.index()] = sum / j.dim() as f64;
        }
        out
    }

    /// `ln lambda_j` per irrep.
    pub fn transfer_log_eigenvalues(&self) -> [f64; 5] {
        let lam = self.transfer_eigenvalues();
        let mut out = [0.0; 5];
        for (o, l) in out.iter_mut().zip(lam) {
            assert!(l > 0.0, "non-positive transfer eigenvalue");
            *o = ln(l);
        }
        out
    }

    /// Casimir coefficients after fixing the trivial irrep to zero and dividing by `e^{-2 beta_g}`.
    /// Tends to `(0, 8, 8, 8, 6)` at weak coupling.
    pub fn shifted_casimirs(&self) -> [f64; 5] {
        let lam = self.transfer_eigenvalues();
        let alpha = exp(-2.0 * self.inv_coupling);
        let mut out = [0.0; 5];
        for j in 1..5 {
            out[j] = ln_1p((lam[0] - lam[j]) / lam[j]) / alpha;
        }
        out
    }

    /// Single-link kinetic Hamiltonian `-ln T` in the group basis, built by conjugating the
    /// per-irrep logarithms with the Fourier transform.
    pub fn hk_single_link(&self) -> RMatrix {
        let logs = self.transfer_log_eigenvalues();
        let diag = RMatrix::from_fn(8, 8, |a, b| {
            if a == b {
                -logs[crate::d4::IrrepSlot::from_index(a).irrep.index()]
            } else {
                0.0
            }
        });
        FourierMatrix::new().to_group_basis(&diag)
    }

    /// Diagonal of `H_V = -beta_g sum_p Re Tr rho_f(P)` over the link basis.
    pub fn potential_diagonal(&self, lattice: &LatticeSpec) -> Vec<f64> {
        (0..lattice.basis_dim())
            .map(|x| {
                -self.inv_coupling
                    * lattice
                        .plaquettes
                        .iter()
                        .map(|p| LatticeSpec::loop_trace(&p.steps, x))
                        .sum::<f64>()
            })
            .collect()
    }
}

impl Default for HamiltonianSpec {
    fn default() -> Self {
        Self {
            inv_coupling: Self::DEFAULT_INV_COUPLING,
        }
    }
}

/// Full lattice Hamiltonian, stored as the potential diagonal plus the single-link kinetic block.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    spec: HamiltonianSpec,
    num_links: usize,
    potential: Vec<f64>,
    kinetic: [[f64; 8]; 8],
}

impl Hamiltonian {
    pub fn new(spec: HamiltonianSpec, lattice: &LatticeSpec) -> Self {
        let hk = spec.hk_single_link();
        let mut kinetic = [[0.0; 8]; 8];
        for (a, row) in kinetic.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                *v = hk[(a, b)];
            }
        }
        Self {
            spec,
            num_links: lattice.num_links(),
            potential: spec.potential_diagonal(lattice),
            kinetic,
        }
    }

    pub fn spec(&self) -> HamiltonianSpec {
        self.spec
    }

    pub fn dim(&self) -> usize {
        self.potential.len()
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn kinetic_block(&self) -> &[[f64; 8]; 8] {
        &self.kinetic
    }

    /// `y = H x` for a real vector.
    pub fn apply_real(&self, x: &[f64], y: &mut [f64]) {
        for (yi, (&v, &xi)) in y.iter_mut().zip(self.potential.iter().zip(x)) {
            *yi = v * xi;
        }
        for l in 0..self.num_links {
            let shift = LINK_QUBITS * l;
            for (idx, yi) in y.iter_mut().enumerate() {
                let a = (idx >> shift) & 7;
                let base = idx & !(7 << shift);
                let row = &self.kinetic[a];
                let mut acc = 0.0;
                for (b, &h) in row.iter().enumerate() {
                    acc += h * x[base | (b << shift)];
                }
                *yi += acc;
            }
        }
    }

    /// `y = H x` for a complex vector.
    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![ZERO; x.len()];
        for (yi, (&v, &xi)) in y.iter_mut().zip(self.potential.iter().zip(x)) {
            *yi = xi * v;
        }
        for l in 0..self.num_links {
            let shift = LINK_QUBITS * l;
            for (idx, yi) in y.iter_mut().enumerate() {
                let a = (idx >> shift) & 7;
                let base = idx & !(7 << shift);
                let mut acc = ZERO;
                for (b, &h) in self.kinetic[a].iter().enumerate() {
                    acc += x[base | (b << shift)] * h;
                }
                *yi += acc;
            }
        }
        y
    }

    /// Dense `dim x dim` matrix. 128 MiB for the 2x1 lattice.
    pub fn to_dense(&self) -> RMatrix {
        let n = self.dim();
        let mut m = RMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.potential[i];
            for l in 0..self.num_links {
                let shift = LINK_QUBITS * l;
                let a = (i >> shift) & 7;
                let base = i & !(7 << shift);
                for b in 0..8 {
                    m[(i, base | (b << shift))] += self.kinetic[a][b];
                }
            }
        }
        m
    }
}
