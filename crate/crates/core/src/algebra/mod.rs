//! Rank-2 commutative algebras, with the paracomplex numbers as the main
//! instance.
//!
//! * [`Paracomplex`] scalars and [`ParaMatrix`] matrices, stored in the
//!   `(1, ε)` basis with canonical `(e₊, e₋)` coordinates on demand.
//! * [`StructureConstants`] for an algebra given by `Cᵏᵢⱼ`, and
//!   [`idempotents`] solving `a a = a` in rank 2.
//! * [`eigensplit`] and [`ParaStructureSpace`] for real spaces with an
//!   involution `K`.
//! * [`cauchy_riemann_residual`] measuring A-differentiability of a real map.
//!
//! A note on signs: with `e± = (1 ± ε)/2` one has `e₊ − e₋ = ε`. The
//! opposite relation `e₋ − e₊ = ε` is sometimes quoted alongside the same
//! definitions; it does not follow from them, and this crate uses
//! `e₊ − e₋ = ε` throughout.

mod cauchy_riemann;
mod matrix;
mod para_space;
mod scalar;
mod structure;

pub use cauchy_riemann::{cauchy_riemann_residual, cauchy_riemann_residual_with, DEFAULT_STEP};
pub use matrix::{vector_to_canonical, ParaMatrix, ParaVector};
pub use para_space::{
    adapted_to_paraholomorphic, eigensplit, involution_residual, paraholomorphic_to_adapted,
    ParaStructureSpace,
};
pub use scalar::{from_canonical, multiply, to_canonical, Para64, Paracomplex};
pub use structure::{idempotents, nontrivial_idempotents, StructureConstants};
