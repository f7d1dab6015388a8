use super::GroupElement;
use crate::math::{sqrt, CMatrix, RMatrix, C64};

pub type Mat2 = [[f64; 2]; 2];

/// One of the five irreducible representations; `0..=3` are one-dimensional,
/// `4` is the two-dimensional fundamental representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IrrepLabel(u8);

/// Rows are irreps, columns are the conjugacy classes `C0..C4`.
pub const CHARACTER_TABLE: [[i32; 5]; 5] = [
    [1, 1, 1, 1, 1],
    [1, 1, 1, -1, -1],
    [1, -1, 1, 1, -1],
    [1, -1, 1, -1, 1],
    [2, 0, -2, 0, 0],
];

impl IrrepLabel {
    pub const COUNT: usize = 5;
    pub const FUNDAMENTAL: Self = Self(4);

    pub const fn new(j: u8) -> Option<Self> {
        if j < 5 {
            Some(Self(j))
        } else {
            None
        }
    }

    /// Panics if `j >= 5`.
    pub const fn from_index(j: usize) -> Self {
        assert!(j < 5, "irrep label out of range");
        Self(j as u8)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn dim(self) -> usize {
        if self.0 == 4 {
            2
        } else {
            1
        }
    }

    pub fn all() -> impl Iterator<Item = Self> + Clone {
        (0..5u8).map(Self)
    }

    /// Basis slots owned by this irrep in the Fourier ordering.
    pub fn slots(self) -> core::ops::Range<usize> {
        if self.0 == 4 {
            4..8
        } else {
            let j = self.0 as usize;
            j..j + 1
        }
    }
}

/// Matrix-element label `(j, alpha, beta)`; also an index into the 8-dimensional irrep basis
/// ordered `(0), (1), (2), (3), (4,0,0), (4,0,1), (4,1,0), (4,1,1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IrrepSlot {
    pub irrep: IrrepLabel,
    pub row: u8,
    pub col: u8,
}

impl IrrepSlot {
    pub const fn one_dim(j: u8) -> Self {
        assert!(j < 4);
        Self {
            irrep: IrrepLabel(j),
            row: 0,
            col: 0,
        }
    }

    pub const fn fund(row: u8, col: u8) -> Self {
        assert!(row < 2 && col < 2);
        Self {
            irrep: IrrepLabel(4),
            row,
            col,
        }
    }

    pub const fn from_index(i: usize) -> Self {
        assert!(i < 8);
        if i < 4 {
            Self::one_dim(i as u8)
        } else {
            Self::fund(((i - 4) >> 1) as u8, ((i - 4) & 1) as u8)
        }
    }

    pub const fn index(self) -> usize {
        if self.irrep.0 < 4 {
            self.irrep.0 as usize
        } else {
            4 + 2 * self.row as usize + self.col as usize
        }
    }

    pub fn all() -> impl Iterator<Item = Self> + Clone {
        (0..8).map(Self::from_index)
    }
}

pub fn character(j: IrrepLabel, g: GroupElement) -> i32 {
    CHARACTER_TABLE[j.index()][g.class()]
}

const SIGMA_X: Mat2 = [[0.0, 1.0], [1.0, 0.0]];
const I_SIGMA_Y: Mat2 = [[0.0, 1.0], [-1.0, 0.0]];
const IDENTITY2: Mat2 = [[1.0, 0.0], [0.0, 1.0]];

pub fn mat2_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Real orthogonal fundamental representation `(sigma_x)^{x2} (i sigma_y)^{2 x1 + x0}`.
pub fn fund_rep(g: GroupElement) -> Mat2 {
    let mut m = if g.is_reflection() { SIGMA_X } else { IDENTITY2 };
    for _ in 0..g.rotation() {
        m = mat2_mul(&m, &I_SIGMA_Y);
    }
    m
}

pub fn fund_trace(g: GroupElement) -> f64 {
    let m = fund_rep(g);
    m[0][0] + m[1][1]
}

/// `rho_j(g)_{alpha beta}` for a basis slot.
pub fn irrep_entry(slot: IrrepSlot, g: GroupElement) -> f64 {
    if slot.irrep.dim() == 1 {
        character(slot.irrep, g) as f64
    } else {
        fund_rep(g)[slot.row as usize][slot.col as usize]
    }
}

/// Projector onto the irrep-`j` isotypic subspace of `C[D4]`,
/// `(d_j / 8) sum_h chi_j(h) R_h^dagger` with `R_h |x> = |x h>`.
pub fn irrep_projector(j: IrrepLabel) -> RMatrix {
    let d = j.dim() as f64;
    RMatrix::from_fn(8, 8, |y, x| {
        let (y, x) = (GroupElement::from_index(y), GroupElement::from_index(x));
        d / 8.0 * character(j, y.inv() * x) as f64
    })
}

/// Right regular representation `R_h |x> = |x h>` as a permutation matrix.
pub fn right_multiplication(h: GroupElement) -> RMatrix {
    RMatrix::from_fn(8, 8, |y, x| {
        (GroupElement::from_index(x) * h == GroupElement::from_index(y)) as u8 as f64
    })
}

/// Left regular representation `L_h |x> = |h x>`.
pub fn left_multiplication(h: GroupElement) -> RMatrix {
    RMatrix::from_fn(8, 8, |y, x| {
        (h * GroupElement::from_index(x) == GroupElement::from_index(y)) as u8 as f64
    })
}

/// The group Fourier transform. `matrix()[(g, slot)] = sqrt(d_j / 8) rho_j(g)_{alpha beta}`;
/// its columns are the irrep basis states written in the group basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierMatrix {
    entries: [[f64; 8]; 8],
}

impl FourierMatrix {
    pub fn new() -> Self {
        let mut entries = [[0.0; 8]; 8];
        for g in GroupElement::all() {
            for slot in IrrepSlot::all() {
                entries[g.index()][slot.index()] =
                    sqrt(slot.irrep.dim() as f64 / 8.0) * irrep_entry(slot, g);
            }
        }
        Self { entries }
    }

    pub fn entry(&self, g: GroupElement, slot: IrrepSlot) -> f64 {
        self.entries[g.index()][slot.index()]
    }

    /// Basis-change matrix from irrep coordinates to group coordinates.
    pub fn matrix(&self) -> RMatrix {
        RMatrix::from_fn(8, 8, |i, j| self.entries[i][j])
    }

    /// The Fourier gate, mapping group-basis amplitudes to irrep-basis amplitudes.
    pub fn gate(&self) -> CMatrix {
        CMatrix::from_fn(8, 8, |i, j| C64::new(self.entries[j][i], 0.0))
    }

    /// Conjugate `op` (group basis) into the irrep basis.
    pub fn to_irrep_basis(&self, op: &RMatrix) -> RMatrix {
        let m = self.matrix();
        m.transpose() * op * m
    }

    /// Conjugate `op` (irrep basis) back into the group basis.
    pub fn to_group_basis(&self, op: &RMatrix) -> RMatrix {
        let m = self.matrix();
        &m * op * m.transpose()
    }
}

impl Default for FourierMatrix {
    fn default() -> Self {
        Self::new()
    }
}
