//! Trust scoring for user-generated annotations and the choice-based conjoint
//! machinery used to calibrate its dimension weights.
//!
//! The crate is split into four areas:
//!
//! - [`trust`]: stability, credibility and quality dimensions, the weighted
//!   trust value, and translation into discrete trust degrees.
//! - [`conjoint`]: factorial designs, choice tallies, count-based utilities and
//!   importances, multinomial-logit part-worth estimation and respondent
//!   simulation.
//! - [`optim`]: a derivative-free Nelder-Mead simplex minimizer.
//! - [`ingest`]: readers and writers for annotation, design, choice and
//!   results files.
//!
//! Batch work (likelihood evaluation, respondent simulation, annotation
//! scoring) runs on rayon when the `parallel` feature is enabled. Every such
//! entry point takes an [`Execution`] so callers can force the sequential
//! path; both paths produce bitwise-identical results.

pub mod conjoint;
pub mod exec;
pub mod ingest;
pub mod optim;
pub mod presets;
pub mod trust;

pub use exec::Execution;
