//! Algorithm selection between QAOA and Goemans-Williamson for MaxCut.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`]: graph type, random regular generation, exact MaxCut, spectra.
//! - [`gw`]: the unit-vector SDP relaxation and hyperplane rounding.
//! - [`qaoa`]: statevector simulation, Nelder-Mead and the warm-start angle search.
//! - [`features`]: the twenty instance features used for selection.
//! - [`selector`]: labels, the two classifier pipelines, cross-validation and
//!   model inspection.
//! - [`pipeline`]: experiment manifests, dataset files, summaries and the CLI.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod features;
pub mod graph;
pub mod gw;
pub mod pipeline;
pub mod qaoa;
pub mod rng;
pub mod selector;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{CutAssignment, Graph, SpectrumReport};
