use alloc::vec::Vec;

use super::irrep::{fund_rep, irrep_entry, FourierMatrix, IrrepSlot};
use super::GroupElement;
use crate::math::{sqrt, RMatrix};

/// One non-zero coupling coefficient `C^{(J,A,B)}_{(j',a',b');(j'',a'',b'')}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgEntry {
    pub coupled: IrrepSlot,
    pub left: IrrepSlot,
    pub right: IrrepSlot,
    pub value: f64,
}

const fn s(i: usize) -> IrrepSlot {
    IrrepSlot::from_index(i)
}

// slot indices: 0..3 one-dimensional, 4 = (4,0,0), 5 = (4,0,1), 6 = (4,1,0), 7 = (4,1,1)
const RAW: [(usize, usize, usize, f64); 42] = [
    (0, 0, 0, 1.0),
    (0, 1, 1, 1.0),
    (0, 2, 2, 1.0),
    (0, 3, 3, 1.0),
    (0, 4, 4, 0.5),
    (0, 5, 5, 0.5),
    (0, 6, 6, 0.5),
    (0, 7, 7, 0.5),
    (1, 0, 1, 1.0),
    (1, 2, 3, 1.0),
    (1, 4, 7, 0.5),
    (1, 5, 6, -0.5),
    (1, 6, 5, -0.5),
    (1, 7, 4, 0.5),
    (2, 0, 2, 1.0),
    (2, 1, 3, 1.0),
    (2, 4, 7, 0.5),
    (2, 5, 6, 0.5),
    (2, 6, 5, 0.5),
    (2, 7, 4, 0.5),
    (3, 0, 3, 1.0),
    (3, 1, 2, 1.0),
    (3, 4, 4, 0.5),
    (3, 5, 5, -0.5),
    (3, 6, 6, -0.5),
    (3, 7, 7, 0.5),
    (4, 0, 4, 1.0),
    (5, 0, 5, 1.0),
    (6, 0, 6, 1.0),
    (7, 0, 7, 1.0),
    (4, 1, 7, 1.0),
    (5, 1, 6, -1.0),
    (6, 1, 5, -1.0),
    (7, 1, 4, 1.0),
    (4, 2, 7, 1.0),
    (5, 2, 6, 1.0),
    (6, 2, 5, 1.0),
    (7, 2, 4, 1.0),
    (4, 3, 4, 1.0),
    (5, 3, 5, -1.0),
    (6, 3, 6, -1.0),
    (7, 3, 7, 1.0),
];

/// Clebsch-Gordan coefficients of D4 in the real basis where `rho_4` is the
/// fundamental representation.
///
/// Only one ordering of `(left, right)` is tabulated for most pairs. Since every
/// irrep is real, the product `rho' rho''` is symmetric under exchange and the
/// missing ordering is read from the swapped pair.
#[derive(Clone, Debug, PartialEq)]
pub struct CgTable {
    entries: Vec<CgEntry>,
}

/// Largest violation of the defining relation for one `(left, right)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgResidual {
    pub left: IrrepSlot,
    pub right: IrrepSlot,
    pub residual: f64,
}

impl CgTable {
    pub fn new() -> Self {
        let entries = RAW
            .iter()
            .map(|&(c, l, r, value)| CgEntry {
                coupled: s(c),
                left: s(l),
                right: s(r),
                value,
            })
            .collect();
        Self { entries }
    }

    pub fn entries(&self) -> &[CgEntry] {
        &self.entries
    }

    pub fn entries_mut(&mut self) -> &mut [CgEntry] {
        &mut self.entries
    }

    /// `C^{coupled}_{left;right}`, zero when absent.
    pub fn coefficient(&self, coupled: IrrepSlot, left: IrrepSlot, right: IrrepSlot) -> f64 {
        self.expansion(left, right)
            .find(|e| e.coupled == coupled)
            .map_or(0.0, |e| e.value)
    }

    /// All coupled terms for the product `rho_left rho_right`.
    pub fn expansion(
        &self,
        left: IrrepSlot,
        right: IrrepSlot,
    ) -> impl Iterator<Item = &CgEntry> + '_ {
        let direct = self.entries.iter().any(|e| e.left == left && e.right == right);
        self.entries.iter().filter(move |e| {
            if direct {
                e.left == left && e.right == right
            } else {
                e.left == right && e.right == left
            }
        })
    }

    /// Checks `rho'(g)_{a'b'} rho''(g)_{a''b''} = sum C rho_J(g)_{AB}` for every `g`
    /// and every pair of basis slots.
    pub fn relation_check(&self) -> Vec<CgResidual> {
        let mut out = Vec::with_capacity(64);
        for left in IrrepSlot::all() {
            for right in IrrepSlot::all() {
                let mut residual: f64 = 0.0;
                for g in GroupElement::all() {
                    let lhs = irrep_entry(left, g) * irrep_entry(right, g);
                    let rhs: f64 = self
                        .expansion(left, right)
                        .map(|e| e.value * irrep_entry(e.coupled, g))
                        .sum();
                    residual = residual.max((lhs - rhs).abs());
                }
                out.push(CgResidual {
                    left,
                    right,
                    residual,
                });
            }
        }
        out
    }

    /// Pairs whose residual exceeds `tol`.
    pub fn violations(&self, tol: f64) -> Vec<CgResidual> {
        self.relation_check()
            .into_iter()
            .filter(|r| r.residual > tol)
            .collect()
    }
}

impl Default for CgTable {
    fn default() -> Self {
        Self::new()
    }
}

/// `sum_g rho_f(g)_{alpha beta} |g><g|` in the group basis.
pub fn link_operator_group(alpha: usize, beta: usize) -> RMatrix {
    let mut m = RMatrix::zeros(8, 8);
    for g in GroupElement::all() {
        m[(g.index(), g.index())] = fund_rep(g)[alpha][beta];
    }
    m
}

/// The link operator `U_{alpha beta}` in the irrep basis.
pub fn link_operator_irrep(alpha: usize, beta: usize) -> RMatrix {
    FourierMatrix::new().to_irrep_basis(&link_operator_group(alpha, beta))
}

/// The link operator assembled from coupling coefficients,
/// `sum sqrt(d' d'') / d_f C^{(f,alpha,beta)}_{j';j''} |j'><j''|`.
pub fn link_operator_from_cg(table: &CgTable, alpha: usize, beta: usize) -> RMatrix {
    let coupled = IrrepSlot::fund(alpha as u8, beta as u8);
    RMatrix::from_fn(8, 8, |a, b| {
        let (left, right) = (IrrepSlot::from_index(a), IrrepSlot::from_index(b));
        let scale = sqrt((left.irrep.dim() * right.irrep.dim()) as f64) / 2.0;
        scale * table.coefficient(coupled, left, right)
    })
}
