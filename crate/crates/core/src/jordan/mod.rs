//! Jordan algebras, Peirce decompositions and Peirce reflections.
//!
//! Algebras are represented by their product table on `ℝᵈ`; the matrix
//! models (symmetric, complex Hermitian, paracomplex Hermitian, spin factor)
//! tabulate the symmetrized product `½(XY + YX)` on a fixed basis and keep a
//! [`Model`] tag describing the coordinates.

mod algebra;
mod peirce;

pub use algebra::{
    herm_coords, herm_matrix, jordan_from_associative, para_herm_coords, para_herm_matrix,
    sym_coords, sym_matrix, AssociativeAlgebra, JordanAlgebra, Model,
};
pub use peirce::{
    peirce_decompose_family, peirce_projections, peirce_reflection, peirce_rules, projector_range,
    PeirceDecomposition, PeirceFamily, PeirceRules, PeirceSpace,
};
