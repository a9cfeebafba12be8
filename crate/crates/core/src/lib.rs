//! Simulation of an entanglement-based location-verification protocol.
//!
//! A device proves where it is by decoding messages that are superdense
//! coded on entangled states, hidden behind random unitary masks, and only
//! decodable once classical reveals arrive — timed so that correct, prompt
//! answers are possible solely at the claimed location. The crate provides:
//!
//! - [`qstate`]: small state-vector simulator — states, gates, Bell and
//!   three-qubit entangled bases, projective measurement, seeded RNG.
//! - [`coding`]: superdense encoding of 2- and 3-bit messages and decoding
//!   by full or linear-optics joint measurement.
//! - [`masking`]: random unitary masks (rotation-angle or Hadamard/T word),
//!   their exact inversion, and ensemble statistics.
//! - [`geomtime`]: station geometry, light-travel timing, and the
//!   placement-soundness criterion.
//! - [`protocol`]: the end-to-end verification session on an analytic
//!   event clock, producing per-round transcripts and a verdict.
//! - [`adversary`]: bounded-fidelity cloning and multi-device relay attacks
//!   with their analytic pass probabilities.
//!
//! Everything is deterministic under a session seed; independent runs use
//! disjoint, explicitly numbered random sub-streams.

pub mod adversary;
pub mod coding;
pub mod error;
pub mod geomtime;
pub mod masking;
pub mod protocol;
pub mod qstate;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
