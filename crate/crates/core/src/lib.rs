//! Beam squint prediction and compensation for phased arrays, plus a
//! system-level simulator for a gNB served by a network-controlled repeater.

pub mod beamforming;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod kpi;
pub mod ran;
pub mod scenario;
pub mod squint;

pub use error::{Error, Result};
