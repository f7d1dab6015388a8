//! Arithmetic and representation theory of the dihedral group D4.

mod cg;
mod element;
mod irrep;

pub use cg::{
    link_operator_from_cg, link_operator_group, link_operator_irrep, CgEntry, CgResidual, CgTable,
};
pub use element::{GroupElement, CLASS_OF, CLASS_SIZES, INV_TABLE, MUL_TABLE};
pub use irrep::{
    character, fund_rep, fund_trace, irrep_entry, irrep_projector, left_multiplication, mat2_mul,
    right_multiplication, FourierMatrix, IrrepLabel, IrrepSlot, Mat2, CHARACTER_TABLE,
};
