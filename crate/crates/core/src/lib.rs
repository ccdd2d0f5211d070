//! Stationarity transformations versus forecast accuracy: synthetic data,
//! transforms, stationarity tests, forecasting models, the experiment harness
//! and its statistical analysis.

pub mod analysis;
pub mod cli;
pub mod harness;
pub(crate) mod linalg;
pub mod metrics;
pub mod models;
pub mod rng;
pub mod series;
pub mod stationarity;
pub mod synthgen;
pub mod transforms;
