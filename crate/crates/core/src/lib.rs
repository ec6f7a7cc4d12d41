//! Entropic uncertainty relations for general SIC-POVMs and mutually
//! unbiased measurements (MUMs).
//!
//! The crate is organised bottom-up:
//!
//! - [`probdist`]: probability vectors, Rényi entropies, the index of
//!   coincidence, the two extremal families `P_x^L[c]` / `P_y^L[c]` and a
//!   brute-force extremality oracle.
//! - [`quantum`]: density matrices, random-state samplers and constructors
//!   for MUBs, MUMs, general SIC-POVMs and rank-1 SICs.
//! - [`bounds`]: every closed-form entropic bound, returned as
//!   [`bounds::BoundResult`] with its intermediate parameters.
//! - [`diagrams`]: Monte-Carlo information diagrams, entropy regions and
//!   bound-gap reports.
//! - [`entanglement`]: the entropic separability criterion and the Werner
//!   threshold scan.
//! - [`verify`]: the invariant/oracle suite behind `eur verify`.

#![forbid(unsafe_code)]

pub mod bounds;
pub mod diagrams;
pub mod entanglement;
mod error;
pub mod probdist;
pub mod quantum;
pub mod verify;

pub use error::{Error, Result};
