//! Paracomplex algebra, Jordan algebras and dually flat statistical
//! manifolds, with numerical checks of their identities.
//!
//! The modules follow the chapters of the guide in `book/`:
//!
//! - [`algebra`]: paracomplex numbers, structure constants, paracomplex spaces.
//! - [`jordan`]: Jordan algebras and Peirce decompositions.
//! - [`cones`]: symmetric cones, signed measures and a self-duality probe.
//! - [`statmanifold`]: finite exponential families and Legendre duality.
//! - [`geometry`]: α-connections, geodesics and the doubled model with its mirror.
//! - [`frobenius`]: WDVV and the structure-connection pencil.
//! - [`report`]: suites, tolerances and report output.
//!
//! ```
//! use paraflat::algebra::Para64;
//!
//! let e = Para64::epsilon();
//! assert_eq!(e * e, Para64::one());
//! ```

pub mod algebra;
pub mod cones;
pub mod error;
pub mod frobenius;
pub mod geometry;
pub mod jordan;
pub mod numdiff;
pub mod report;
pub mod statmanifold;
pub mod table;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/algebra.md")]
    mod algebra {}
    #[doc = include_str!("../../../book/src/jordan.md")]
    mod jordan {}
    #[doc = include_str!("../../../book/src/cones.md")]
    mod cones {}
    #[doc = include_str!("../../../book/src/statmanifold.md")]
    mod statmanifold {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    mod geometry {}
    #[doc = include_str!("../../../book/src/frobenius.md")]
    mod frobenius {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/report.md")]
    mod report {}
}
