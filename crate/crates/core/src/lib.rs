//! Hybrid analog/digital precoding for single-group multicasting with a
//! limited number of RF chains.
//!
//! - [`channel`]: Rayleigh and finite-scattering ULA channel generation.
//! - [`maxmin`]: max-min SNR beamforming by semidefinite relaxation and
//!   Gaussian randomization under a general quadratic power constraint.
//! - [`codebook`]: constant-modulus RF codebooks and RF-precoder enumeration.
//! - [`hybrid`]: upper-bound ranking search, exhaustive search, the AoD-aware
//!   construction and the antenna-subset baseline.
//! - [`experiment`]: the Monte Carlo harness, summaries and file output.

pub mod channel;
pub mod codebook;
pub mod error;
pub mod experiment;
pub mod hybrid;
pub mod linalg;
pub mod maxmin;

pub use error::{Error, Result};
