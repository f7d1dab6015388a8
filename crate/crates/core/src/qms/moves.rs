use alloc::vec::Vec;

use crate::d4::{FourierMatrix, IrrepSlot};
use crate::gauge::{LatticeSpec, LoopStep};
use crate::math::{cis, sqrt, CMatrix, RMatrix, C64, ZERO};
use crate::statevector::RngStream;
use crate::{Error, Result};

/// The four Metropolis moves `R1, R1^dag, R2, R2^dag`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    R1,
    R1Dag,
    R2,
    R2Dag,
}

impl Move {
    pub const ALL: [Move; 4] = [Move::R1, Move::R1Dag, Move::R2, Move::R2Dag];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn adjoint(self) -> Self {
        match self {
            Move::R1 => Move::R1Dag,
            Move::R1Dag => Move::R1,
            Move::R2 => Move::R2Dag,
            Move::R2Dag => Move::R2,
        }
    }

    fn is_adjoint(self) -> bool {
        matches!(self, Move::R1Dag | Move::R2Dag)
    }
}

/// Two random gauge-invariant generators and their exponentials.
///
/// `A1 = sum_c r_c Re Tr W_c` over a set of Wilson loops is diagonal in the link basis.
/// `A2 = sum_{l,j} r_{j;l} P_j^(l)` is a sum of single-link irrep projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MoveSet {
    theta: [f64; 2],
    loops: Vec<Vec<LoopStep>>,
    wilson: Vec<f64>,
    irrep: Vec<[f64; 5]>,
    a1: Vec<f64>,
    a2_links: Vec<RMatrix>,
    r2_links: [Vec<CMatrix>; 2],
}

/// RNG stream reserved for drawing moveset coefficients.
pub const MOVESET_STREAM: u64 = u64::MAX;

impl MoveSet {
    /// Wilson loops from words of up to `wilson_length` based cycles; coefficients i.i.d.
    /// uniform on `[-1, 1]` from the seed's reserved stream.
    pub fn random(lattice: &LatticeSpec, seed: u64, theta: [f64; 2], wilson_length: usize) -> Self {
        let loops = lattice.wilson_loops(wilson_length);
        let mut rng = RngStream::new(seed, MOVESET_STREAM);
        let wilson: Vec<f64> = loops.iter().map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let irrep: Vec<[f64; 5]> = (0..lattice.num_links())
            .map(|_| core::array::from_fn(|_| rng.uniform_in(-1.0, 1.0)))
            .collect();
        Self::from_coefficients(lattice, loops, wilson, irrep, theta).expect("shapes match the lattice")
    }

    pub fn from_coefficients(
        lattice: &LatticeSpec,
        loops: Vec<Vec<LoopStep>>,
        wilson: Vec<f64>,
        irrep: Vec<[f64; 5]>,
        theta: [f64; 2],
    ) -> Result<Self> {
        if wilson.len() != loops.len() {
            return Err(Error::DimensionMismatch {
                expected: loops.len(),
                found: wilson.len(),
            });
        }
        if loops.iter().any(|c| !lattice.is_closed(c)) {
            return Err(Error::invalid("loops", "every Wilson loop must be closed"));
        }
        if irrep.len() != lattice.num_links() {
            return Err(Error::DimensionMismatch {
                expected: lattice.num_links(),
                found: irrep.len(),
            });
        }
        let a1 = (0..lattice.basis_dim())
            .map(|x| {
                loops
                    .iter()
                    .zip(&wilson)
                    .map(|(c, r)| r * LatticeSpec::loop_trace(c, x))
                    .sum()
            })
            .collect();
        let m = FourierMatrix::new().matrix();
        let slot_value = |r: &[f64; 5], s: usize| r[IrrepSlot::from_index(s).irrep.index()];
        let a2_links: Vec<RMatrix> = irrep
            .iter()
            .map(|r| {
                let d = RMatrix::from_fn(8, 8, |a, b| if a == b { slot_value(r, a) } else { 0.0 });
                &m * d * m.transpose()
            })
            .collect();
        let r2 = |sign: f64| -> Vec<CMatrix> {
            irrep
                .iter()
                .map(|r| {
                    CMatrix::from_fn(8, 8, |g, h| {
                        (0..8)
                            .map(|s| cis(sign * theta[1] * slot_value(r, s)) * (m[(g, s)] * m[(h, s)]))
                            .sum()
                    })
                })
                .collect()
        };
        Ok(Self {
            theta,
            r2_links: [r2(1.0), r2(-1.0)],
            loops,
            wilson,
            irrep,
            a1,
            a2_links,
        })
    }

    pub fn theta(&self) -> [f64; 2] {
        self.theta
    }

    pub fn loops(&self) -> &[Vec<LoopStep>] {
        &self.loops
    }

    pub fn wilson_coefficients(&self) -> &[f64] {
        &self.wilson
    }

    pub fn irrep_coefficients(&self) -> &[[f64; 5]] {
        &self.irrep
    }

    /// Diagonal of `A1` over the link basis.
    pub fn a1_diagonal(&self) -> &[f64] {
        &self.a1
    }

    /// Single-link term of `A2` in the group basis.
    pub fn a2_link(&self, l: usize) -> &RMatrix {
        &self.a2_links[l]
    }

    /// `e^{+-i theta_1 A1}` as phases over the link basis.
    pub fn r1_phases(&self, adjoint: bool) -> Vec<C64> {
        let s = if adjoint { -1.0 } else { 1.0 };
        self.a1.iter().map(|a| cis(s * self.theta[0] * a)).collect()
    }

    /// Single-link factor of `e^{+-i theta_2 A2}`.
    pub fn r2_link(&self, l: usize, adjoint: bool) -> &CMatrix {
        &self.r2_links[adjoint as usize][l]
    }

    pub fn num_links(&self) -> usize {
        self.irrep.len()
    }

    /// Apply a move to every 4096-amplitude block of `psi` (links in the lowest bits).
    pub fn apply(&self, mv: Move, psi: &mut [C64]) {
        let dim = self.a1.len();
        match mv {
            Move::R1 | Move::R1Dag => {
                let ph = self.r1_phases(mv.is_adjoint());
                for block in psi.chunks_mut(dim) {
                    block.iter_mut().zip(&ph).for_each(|(a, p)| *a *= p);
                }
            }
            Move::R2 | Move::R2Dag => {
                for l in 0..self.num_links() {
                    apply_link_unitary(psi, l, self.r2_link(l, mv.is_adjoint()));
                }
            }
        }
    }

    /// Frobenius norm of `[A1, A2]` on the link space.
    pub fn commutator_norm(&self) -> f64 {
        let mut acc = 0.0;
        for x in 0..self.a1.len() {
            for (l, a2) in self.a2_links.iter().enumerate() {
                let g = (x >> (3 * l)) & 7;
                let base = x & !(7 << (3 * l));
                for h in 0..8 {
                    let y = base | (h << (3 * l));
                    let c = (self.a1[y] - self.a1[x]) * a2[(h, g)];
                    acc += c * c;
                }
            }
        }
        sqrt(acc)
    }
}

/// Apply an 8x8 unitary to link register `l` of every basis block.
pub fn apply_link_unitary(psi: &mut [C64], l: usize, u: &CMatrix) {
    let shift = 3 * l;
    let mut buf = [ZERO; 8];
    let stride = 1usize << shift;
    let span = stride << 3;
    for hi in (0..psi.len()).step_by(span) {
        for lo in 0..stride {
            let base = hi + lo;
            for (g, b) in buf.iter_mut().enumerate() {
                *b = psi[base + g * stride];
            }
            for h in 0..8 {
                psi[base + h * stride] = (0..8).map(|g| u[(h, g)] * buf[g]).sum();
            }
        }
    }
}
