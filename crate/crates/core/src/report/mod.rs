//! Named verification suites and their reports.
//!
//! [`run_suite`] executes every case of a suite with a seeded generator per
//! case and returns a [`Report`]; [`emit_table`] serializes it as JSON, CSV
//! or aligned text. Case residuals depend only on the seed, the
//! tolerances and the difference steps, so two runs with the same
//! [`SuiteConfig`] produce the same case table bit for bit. Wall time is kept
//! in a separate `timing` record.

mod config;
mod record;
mod suites;

pub use config::{SuiteConfig, FD_STEPS, TOLERANCES};
pub use record::{emit_table, CaseRecord, Format, Relation, Report, Timing, SCHEMA_VERSION};
pub use suites::{run_suite, SUITES};
