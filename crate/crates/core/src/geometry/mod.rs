//! Connections, curvature and geodesics on coordinate charts.
//!
//! Metrics and connections are fields over an open subset of `ℝᵈ`
//! ([`MetricField`], [`ConnectionField`]). Christoffel symbols are stored as
//! `Γᵏᵢⱼ` ([`Christoffel`]); derivatives of fields are taken by central
//! differences with a default step of `1e-4`.

mod connections;
mod curvature;
mod fields;
mod geodesic;
mod para_model;

pub use connections::{
    alpha_connection, alpha_connection_expectation, alpha_connection_expectation_by_transform,
    dual_third_derivatives, levi_civita, metric_compatibility_residual, metric_derivatives,
    AlphaConnection, AlphaConnectionExpectation, DualFisherMetric, FisherMetric, LeviCivita,
    DEFAULT_H,
};
pub use curvature::{
    conjugacy_probe, conjugacy_residual, curvature_probe, curvature_residual, riemann, StepProbe,
};
pub use fields::{
    Christoffel, ConnectionField, ConnectionFn, ConstantMetric, FlatConnection, MetricField,
    MetricFn,
};
pub use geodesic::{
    geodesic, totally_geodesic_check, AffineSubspace, TotallyGeodesicReport, Trajectory,
};
pub use para_model::{
    assemble_algebra_connection, AlgebraChristoffel, LeafFamily, ParaModelConnection,
    ParaModelManifold,
};
