//! Exponential families on finite sample spaces.
//!
//! A [`FiniteExpFamily`] is given by a `k × d` table of sufficient
//! statistics `T` and positive base weights `λ`. All expectations are exact
//! sums over the `k` outcomes. The log-partition `ψ` and its dual `φ` form a
//! Legendre pair linking natural parameters `θ` and expectation parameters
//! `η = ∇ψ(θ)`.
//!
//! ```
//! use nalgebra::dvector;
//! use paraflat::statmanifold::FiniteExpFamily;
//!
//! let bern = FiniteExpFamily::bernoulli();
//! let g = bern.fisher_metric(&dvector![0.0]).unwrap();
//! assert!((g[(0, 0)] - 0.25).abs() < 1e-15);
//! let theta = bern.legendre_inverse(&dvector![0.5]).unwrap();
//! assert!(theta[0].abs() < 1e-12);
//! ```

mod family;
mod legendre;

pub use family::{FamilySpec, FiniteExpFamily, LogPartition, DEGENERACY_TOL};
pub use legendre::{
    HessianProductResidual, LegendrePoint, BOUNDARY_EIGENVALUE, NEWTON_MAX_ITER, NEWTON_TOL,
};
