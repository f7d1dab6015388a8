use core::fmt;
use core::ops::Mul;

/// Element `s^{x2} r^{2 x1 + x0}` of the dihedral group of order 8, stored by its
/// index `4 x2 + 2 x1 + x0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement(u8);

const fn product_index(a: u8, b: u8) -> u8 {
    let (sa, ka) = (a >> 2, a & 3);
    let (sb, kb) = (b >> 2, b & 3);
    // r^k s = s r^{-k}
    let k = if sb == 0 { (ka + kb) & 3 } else { ((4 - ka) + kb) & 3 };
    ((sa ^ sb) << 2) | k
}

const fn build_table() -> [[u8; 8]; 8] {
    let mut t = [[0u8; 8]; 8];
    let mut a = 0;
    while a < 8 {
        let mut b = 0;
        while b < 8 {
            t[a][b] = product_index(a as u8, b as u8);
            b += 1;
        }
        a += 1;
    }
    t
}

const fn build_inverse() -> [u8; 8] {
    let mut inv = [0u8; 8];
    let mut a = 0;
    while a < 8 {
        let mut b = 0;
        while b < 8 {
            if MUL_TABLE[a][b] == 0 {
                inv[a] = b as u8;
            }
            b += 1;
        }
        a += 1;
    }
    inv
}

/// `MUL_TABLE[a][b]` is the index of `ab`.
pub const MUL_TABLE: [[u8; 8]; 8] = build_table();
pub const INV_TABLE: [u8; 8] = build_inverse();

/// Conjugacy class of each element: `{e}`, `{r, r^3}`, `{r^2}`, `{s, s r^2}`, `{s r, s r^3}`.
pub const CLASS_OF: [u8; 8] = [0, 1, 2, 1, 3, 4, 3, 4];
pub const CLASS_SIZES: [usize; 5] = [1, 2, 1, 2, 2];

impl GroupElement {
    pub const ORDER: usize = 8;
    pub const E: Self = Self(0);
    pub const R: Self = Self(1);
    pub const R2: Self = Self(2);
    pub const R3: Self = Self(3);
    pub const S: Self = Self(4);
    pub const SR: Self = Self(5);
    pub const SR2: Self = Self(6);
    pub const SR3: Self = Self(7);

    pub const fn new(index: u8) -> Option<Self> {
        if index < 8 {
            Some(Self(index))
        } else {
            None
        }
    }

    /// Panics if `index >= 8`.
    pub const fn from_index(index: usize) -> Self {
        assert!(index < 8, "group element index out of range");
        Self(index as u8)
    }

    pub const fn from_bits(x2: bool, x1: bool, x0: bool) -> Self {
        Self(((x2 as u8) << 2) | ((x1 as u8) << 1) | x0 as u8)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    /// `(x2, x1, x0)`.
    pub const fn bits(self) -> (bool, bool, bool) {
        (self.0 & 4 != 0, self.0 & 2 != 0, self.0 & 1 != 0)
    }

    pub const fn is_reflection(self) -> bool {
        self.0 & 4 != 0
    }

    /// Power of `r` in the normal form.
    pub const fn rotation(self) -> u8 {
        self.0 & 3
    }

    pub const fn mul(self, other: Self) -> Self {
        Self(MUL_TABLE[self.0 as usize][other.0 as usize])
    }

    pub const fn inv(self) -> Self {
        Self(INV_TABLE[self.0 as usize])
    }

    pub const fn class(self) -> usize {
        CLASS_OF[self.0 as usize] as usize
    }

    pub fn all() -> impl Iterator<Item = Self> + Clone {
        (0..8u8).map(Self)
    }
}

impl Mul for GroupElement {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        GroupElement::mul(self, rhs)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.is_reflection() { "s" } else { "" };
        match (s, self.rotation()) {
            ("", 0) => f.write_str("e"),
            (s, 0) => f.write_str(s),
            (s, 1) => write!(f, "{s}r"),
            (s, k) => write!(f, "{s}r{k}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use GroupElement as G;

    #[test]
    fn presentation_relations() {
        assert_eq!(G::R * G::R3, G::E);
        assert_eq!(G::S * G::S, G::E);
        let sr = G::S * G::R;
        assert_eq!(sr * sr, G::E);
        assert_eq!(G::R * G::R * G::R * G::R, G::E);
        assert_eq!(sr, G::SR);
    }

    #[test]
    fn inverses() {
        assert_eq!(G::E.inv(), G::E);
        assert_eq!(G::R.inv(), G::R3);
        assert_eq!(G::S.inv(), G::S);
        for g in G::all() {
            assert_eq!(g * g.inv(), G::E);
            assert_eq!(g.inv() * g, G::E);
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for a in G::all() {
            assert_eq!(a * G::E, a);
            assert_eq!(G::E * a, a);
            for b in G::all() {
                for c in G::all() {
                    assert_eq!((a * b) * c, a * (b * c));
                }
            }
        }
    }

    #[test]
    fn rows_are_permutations() {
        for a in 0..8 {
            let mut seen = [false; 8];
            for b in 0..8 {
                seen[MUL_TABLE[a][b] as usize] = true;
            }
            assert!(seen.iter().all(|&x| x));
        }
    }

    #[test]
    fn conjugacy_classes_by_enumeration() {
        for g in G::all() {
            let mut class = [false; 8];
            for h in G::all() {
                class[(h * g * h.inv()).index()] = true;
            }
            let members: alloc::vec::Vec<_> = (0..8).filter(|&i| class[i]).collect();
            assert_eq!(members.len(), CLASS_SIZES[g.class()]);
            assert!(members.iter().all(|&i| CLASS_OF[i] as usize == g.class()));
        }
    }

    #[test]
    fn bit_encoding() {
        assert_eq!(G::from_bits(true, true, false), G::SR2);
        assert_eq!(G::SR3.bits(), (true, true, true));
        assert_eq!(alloc::format!("{}", G::SR3), "sr3");
    }
}
