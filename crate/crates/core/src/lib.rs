//! Boson sampling validation by sample-space filling.
//!
//! Samples from the exact boson sampler or one of the classical mock-ups are
//! turned into wave function networks (snapshots linked when their L1
//! distance is below an activation radius). The mean and spread of the
//! network degree distribution grow with the number of samples in a way that
//! is characteristic of the sampler; the fitted growth coefficients form a
//! fingerprint, and a black box is rejected as a given mock-up when its
//! fingerprint is separated from that mock-up's.

pub mod config;
pub mod error;
pub mod filling;
pub mod io;
pub mod math;
pub mod samplers;
pub mod seed;
pub mod validator;
pub mod wfn;

pub use error::{Error, Result};
