//! Workload characterization toolkit: derives micro-architectural metric
//! vectors from counter profiles, reduces a workload set to representatives
//! (z-score, PCA, K-means), labels workloads by system and data behavior, and
//! estimates cache footprints from access traces.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cachesim;
pub mod classify;
pub mod error;
pub mod ingest;
pub mod model;
pub mod reduction;
pub mod report;

pub use error::{Error, Result};
