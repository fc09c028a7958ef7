//! Frobenius structures from a potential on a flat chart: the product
//! `g(X∘Y, Z) = Φ_XYZ`, the WDVV equations and the structure-connection
//! pencil `∇_λ = ∇₀ + λ ∘`.

mod data;
mod potential;

pub use data::{parse_metric, FrobeniusData, PencilConnection, FIXTURES};
pub use potential::{
    symmetry_residual, FnPotential, LogPartitionPotential, PolynomialPotential, Potential, FD_STEP,
};
