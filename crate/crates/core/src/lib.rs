//! Deterministic models of Gaussian relay and interference networks.
//!
//! The crate derives the linear deterministic and discrete superposition
//! counterparts of a Gaussian network, compares their cut values, evaluates
//! the closed-form gap constants, and lifts codes written for the discrete
//! superposition network into codes for the Gaussian network.

pub mod bounds;
pub mod capacity;
pub mod error;
pub mod gf2;
pub mod info;
pub mod lifting;
pub mod models;
pub mod network;
pub mod qarith;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
