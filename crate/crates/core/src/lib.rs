//! Disentanglement metrics for paired factor/code matrices.

pub mod error;
pub mod estimators;
pub mod harness;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod ml;
pub mod repr;
pub mod seed;
pub mod synth;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use repr::{validate_representation, Component, FactorKind, MetricReport, Representation, ResultRow};
