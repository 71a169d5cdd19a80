//! Clipping-distortion recovery for OFDM receivers.
//!
//! An OFDM transmitter that hard-limits its time-domain signal adds a sparse
//! clipping signal `c` to the data. This crate implements a pilotless
//! receiver that estimates `c` from differential observations on a subset of
//! data tones: per-tone decision reliabilities rank the tones, probability
//! bounds size the measurement set, and sparse-recovery solvers (a weighted
//! phase-augmented LASSO and a Bayesian matching pursuit) reconstruct the
//! clipping signal so the block can be re-decoded.
//!
//! Module map:
//! - [`qam`] — square M-QAM constellations and nearest-point decoding.
//! - [`ofdm`] — unitary DFT/IDFT, block synthesis, amplitude clipping.
//! - [`channel`] — block-fading Rayleigh channel, AWGN, equalization.
//! - [`stats`] — closed-form clipping statistics (E[|c|²], E[|I_c|], σ_C², σ_D²).
//! - [`reliability`] — decision-reliability criteria and the Lambert-W
//!   convexity-transition radius.
//! - [`selection`] — top-m tone selection and cardinality bounds.
//! - [`recovery`] — WPAL, PABMP and Oracle-LS sparse solvers.
//! - [`pipeline`] — the end-to-end receiver and per-trial metrics.
//! - [`cli`] — Monte-Carlo sweep harness behind the `clipfix` binary.

pub mod channel;
pub mod cli;
pub mod error;
pub mod ofdm;
pub mod pipeline;
pub mod qam;
pub mod recovery;
pub mod reliability;
pub mod selection;
pub mod stats;

pub use error::{ClipfixError, Result};
