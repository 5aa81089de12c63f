//! Robust transceiver design for K-user MIMO interference channels when the
//! designer only sees an estimate of the channel.
//!
//! Each receiver picks its filter columns by maximizing a first-order
//! approximation of the mean SINR over the CSI error, and the design
//! alternates between the forward network and its TDD-reciprocal twin.
//!
//! The crate is split by concern:
//!
//! * [`numerics`]: complex Hermitian kernels (Cholesky, leading generalized
//!   eigenvector, orthonormal initialization).
//! * [`network`]: configuration, channel sampling and the reciprocal view.
//! * [`beamform`]: per-stream objective matrices, receiver updates, the
//!   alternating design loop and its convergence metric.
//! * [`analysis`]: SINR, sum rate, energy efficiency and the mean-SINR
//!   estimators used for accuracy studies.

pub mod analysis;
pub mod beamform;
mod error;
pub mod network;
pub mod numerics;
pub mod rng;

pub use analysis::{AccuracyRow, EvalChannel, StreamStat};
pub use beamform::{AlgoOptions, Algorithm, FilterBank, QfPair, RunTrace};
pub use error::{Error, Result};
pub use network::{ChannelMap, ChannelSet, NetworkConfig};
pub use numerics::{CMatrix, EigPair};

pub use num_complex::Complex64;
