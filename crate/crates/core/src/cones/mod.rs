//! Symmetric cones: membership oracles, self-duality probes and the cone of
//! positive measures on a finite sample space.
//!
//! Classes are real, complex and quaternion positive definite matrices, the
//! paracomplex class (pairs of real positive definite matrices in canonical
//! coordinates), and the positive orthant of measures. The trace pairing
//! used for duality is described at [`pairing`].

mod measure;
mod membership;
mod probe;

pub use measure::{hahn_jordan, measure_pair_embed, SignedMeasure};
pub use membership::{
    exclusion_witness, is_positive, pairing, quaternion_embedding, Certificate, ConeClass,
    ConeElement, Membership,
};
pub use probe::{random_exterior, random_member, self_duality_probe, trial_rng, ProbeReport};
