//! Track-keyed temporal filtering of person attributes.
//!
//! The crate wires a lightweight IoU tracker to per-track g-h filters for
//! head orientation and upper-body joints, runs the analysis modules on a
//! stride ("free flight") with the filters predicting in between, and scores
//! the result with CLEAR MOT, PCO and PCKh on synthetic, fully annotated
//! scenarios.

pub mod angle;
pub mod assign;
pub mod bank;
pub mod emulate;
pub mod error;
pub mod experiment;
pub mod ghfilter;
pub mod metrics;
pub mod pipeline;
pub mod scenario;
pub mod simgen;
pub mod tracker;
pub mod types;

pub use error::{Error, Result};
