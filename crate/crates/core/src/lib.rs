//! Covert communication through a simultaneously transmitting and reflecting
//! RIS: detection and outage analytics, a small complex SDP solver, and the
//! alternating beamforming optimizer with its experiment runner.
//!
//! Scalar closed forms are generic over [`Real`]; the aliases below fix the
//! precision for callers that do not care.

pub mod conic;
pub mod detection;
pub mod error;
pub mod experiments;
pub mod model;
pub mod optimizer;
pub mod outage;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};
pub use model::{
    capacities, cascade_vectors, generate_channels, path_loss_gain, Beamformers, Cascade,
    CascadePowers, ChannelSet, StarRisState, SystemConfig, C64,
};
pub use scalar::Real;

pub type DetectionParamsF64 = detection::DetectionParams<f64>;
pub type DetectionParamsF32 = detection::DetectionParams<f32>;
pub type AsymptoticParamsF64 = detection::AsymptoticParams<f64>;
pub type AsymptoticParamsF32 = detection::AsymptoticParams<f32>;
pub type OutageParamsF64 = outage::OutageParams<f64>;
pub type OutageParamsF32 = outage::OutageParams<f32>;
