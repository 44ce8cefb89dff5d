//! Constraint reasoning for geographic information quality.
//!
//! The crate is organised around four analysis pipelines that share a
//! common vocabulary of reliability grades:
//!
//! - [`flood`]: interval propagation of water heights over a parcel flow
//!   graph, consistency checking and removal-based revision.
//! - [`fusion`]: road/stream overlay, the bridge rule, and categorisation of
//!   discrepancies by quality parameter.
//! - [`translation`]: land-cover taxonomies, graded class translations and
//!   change detection through a common ontology.
//! - [`fitness`]: conflation of product and problem ontologies into a
//!   fitness-for-use verdict.
//!
//! [`cli`] wires the pipelines to JSON files, reports and SVG figures.

pub mod cli;
pub mod exec;
pub mod flood;
pub mod format;
pub mod fitness;
pub mod fusion;
pub mod grades;
pub mod translation;

pub use exec::Execution;
pub use grades::{Grade, GradeError, GradeLattice};
