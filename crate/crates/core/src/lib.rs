//! Bit error rate of dual-hop decode-and-forward relays that power their
//! second hop from harvested energy, over double-Rayleigh (cascaded) fading.
//!
//! Two independent routes are provided: closed-form evaluation through Meijer
//! G-functions ([`analytic`]) and link-level Monte-Carlo simulation
//! ([`montecarlo`]). [`harness`] runs parameter sweeps over either.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod harvester;
pub mod meijer;
pub mod montecarlo;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
