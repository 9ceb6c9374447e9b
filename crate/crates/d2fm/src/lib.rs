//! Deep dynamic factor model nowcasting engine.
//!
//! A denoising autoencoder with linear factor and idiosyncratic dynamics is
//! trained on a mixed-frequency monthly panel, then cast into a linear
//! Gaussian state space for real-time backcasts, nowcasts, and forecasts of
//! a quarterly target. The crate also ships the pseudo-real-time evaluation
//! protocol: publication-delay vintage replay, an AR(1) benchmark, expanding
//! backtests with RMSFE reports, hyperparameter cross-validation, and a
//! composite business-cycle indicator.
//!
//! All numerics are generic over the scalar type via [`num::Scalar`]
//! (f32 or f64); the `*64` aliases at the crate root pin the double
//! precision instantiation the pipeline uses.

pub mod calendar;
pub mod data;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod network;
pub mod num;

pub use calendar::Month;
pub use error::{Error, Result};
pub use num::Scalar;

/// Double-precision aliases used by the command-line pipeline.
pub type Panel64 = data::Panel<f64>;
pub type Standardizer64 = data::Standardizer<f64>;
pub type Vintage64 = data::Vintage<f64>;
pub type NetworkState64 = network::NetworkState<f64>;
pub type ArModel64 = dynamics::ArModel<f64>;
pub type VarModel64 = dynamics::VarModel<f64>;
