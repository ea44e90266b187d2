//! Uplink slotted ALOHA with capture over distributed and co-located
//! massive MIMO deployments.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the numerical model
//! only: node placement and path loss ([`topology`]), Rayleigh fading
//! ([`channel`]), user-centric AP clusters ([`clustering`]), per-slot user
//! activity ([`traffic`]), centralized and local MMSE detection
//! ([`detection`]) and the capture/throughput bookkeeping ([`metrics`]).
//! Randomness always comes from a caller-owned [`rand::Rng`].
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod channel;
pub mod clustering;
pub mod detection;
mod error;
pub mod linalg;
pub mod metrics;
pub mod topology;
pub mod traffic;

pub use error::Error;
pub use num_complex::Complex64;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
