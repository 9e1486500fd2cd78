//! Predictor-based subspace identification for multi-channel thermal systems.
//!
//! The crate covers the full workflow: signal conditioning of raw sensor
//! records ([`preprocess`]), estimation of a high-order VARX predictor with
//! AIC order selection ([`varx`]), recovery of a low-order Kalman-innovation
//! state-space model through an SVD of the predictor's block-shifted Markov
//! matrix ([`sid`]), model-structure selection over the (order, window) grid
//! with open- and closed-loop validation ([`select`]), residual whiteness
//! analysis ([`residual`]) and a synthetic heat-rod plant plus linear
//! simulators for generating ground-truth data ([`simulate`]).

pub mod dataset;
pub mod error;
pub mod hankel;
mod linalg;
pub mod model;
pub mod preprocess;
pub mod residual;
pub mod select;
pub mod sid;
pub mod simulate;
pub mod varx;

pub use dataset::SignalDataset;
pub use error::{Error, Result};
pub use model::{InnovationModel, VarxEstimate};
