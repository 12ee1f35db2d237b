//! gavel: a preference-based structured argumentation engine.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`kb`] parses, validates, prints and merges knowledge bases written
//!    as labelled defeasible rules with strong negation and `prefer`
//!    statements.
//! 2. [`ground`] instantiates rule schemas over the constant domain,
//!    optionally driven by inline query bindings (`X = lime`).
//! 3. [`framework`] generates arguments from ground rule instances,
//!    computes rebuttal and undermining attacks, and orients rebuttals by
//!    rule priority.
//! 4. [`solver`] computes the grounded IN/OUT/UNDEC labelling and answers
//!    acceptance queries; admissible sets are enumerable for audit.
//! 5. [`selector`] runs both polarity queries per candidate explainer and
//!    ranks the outcomes, with a default-explainer fallback.
//! 6. [`report`] renders replayable traces, DOT graphs and JSON reports.
//!
//! Abstract frameworks can bypass stages 1-3 through [`af`]. The [`cli`]
//! module exposes everything as the `gavel` binary.

pub mod af;
pub mod cli;
pub mod framework;
pub mod ground;
pub mod kb;
pub mod report;
pub mod selector;
pub mod solver;

#[cfg(test)]
pub(crate) mod test_support;
