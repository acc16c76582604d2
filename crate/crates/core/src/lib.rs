//! Variational quantum kernel k-means.
//!
//! Classical points are embedded into quantum states by a trainable feature
//! map, clustered by kernel k-means on the exact statevectors, and the map is
//! trained to minimize the overlap between clusters in feature space.

// `!(x > 0.0)` guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod clustering;
pub mod datasets;
mod error;
pub mod feature_map;
pub mod quantum;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
