//! Closed-form performance analysis of an interweave/underlay cognitive radio
//! whose secondary transmitter uses a sectored reconfigurable antenna.
//!
//! The crate covers the full chain: antenna pattern integrals, sector-sweep
//! energy detection, two-beam selection statistics, the capacity lower bound
//! and its optimizer, outage and symbol error probability, and a frame-level
//! Monte Carlo simulator used to audit all of the above.
//!
//! Everything here is `no_std` + `alloc`; the `std` feature only switches the
//! float backend from `libm` to the platform implementation.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod antenna;
pub mod beams;
pub mod capacity;
mod error;
pub mod metrics;
pub mod montecarlo;
pub mod quadrature;
pub mod sensing;
pub mod special;

pub use error::{Error, Result};

/// Natural log of 2, used to convert nats to bits.
pub const LN_2: f64 = core::f64::consts::LN_2;
