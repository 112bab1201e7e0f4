//! Active learning for path classification on overcomplete spatial graphs.
//!
//! The crate is organised around [`graph::SampleGraph`]: candidate paths are
//! samples, and samples whose paths share an endpoint are adjacent. On top of
//! that sit a boosted-tree path classifier, neighborhood probability
//! propagation, density-weighted batch selection, an experiment harness with
//! a simulated annotator, a synthetic dataset generator, heuristic tree
//! extraction and a session model for interactive annotation.

pub mod error;
pub mod classifier;
pub mod graph;
pub mod propagation;
pub mod strategy;
pub mod synthetic;
pub mod harness;
pub mod reconstruction;
pub mod session;

pub use error::{Error, Result};
pub use graph::{LabelSet, Sample, SampleGraph, SpatialGraph};
